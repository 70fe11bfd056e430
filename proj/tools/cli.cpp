#include "qcpd_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "qcpd/errors.hpp"
#include "qcpd/event_pipeline.hpp"
#include "qcpd/experiments.hpp"
#include "qcpd/sweep_io.hpp"

#ifndef QCPD_VERSION
#define QCPD_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace qcpd::cli {

namespace {

constexpr const char *kOutDirVar = "QCPD_OUT_DIR";

struct Common {
    std::uint64_t seed{1};
    int threads{0};
    std::string out;
    std::string format{"csv"};
};

struct Params {
    int n{20};
    double c2{0.604};
    std::optional<int> k;
    std::string strategies{"bl,bi"};
    std::string strategy{"bi"};
    std::int64_t trials{20000};
    double epsilon{0.0};
    std::string grid{"default"};
    std::string n_values{"5,10,15,20,25,30,35,40"};
    int exact_n{8};
    // pipeline
    std::string input;
    int frames{1};
    std::string basis{"hv"};
    TimingConfig timing{};
    EmissionRates rates{};
    std::string pair_stats{"fixed"};
    // replay
    std::string manifest;
    std::string out_dir;
    std::optional<int> replay_threads;
    bool verify{false};
};

// ---------------------------------------------------------------------------
// helpers

std::vector<std::string> split(const std::string &text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        parts.push_back(item);
    }
    if (!text.empty() && text.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

double to_double(const std::string &s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception &) {
        throw DomainError("not a number: '" + s + "'");
    }
    if (used != s.size()) {
        throw DomainError("not a number: '" + s + "'");
    }
    return v;
}

int parse_int_text(const std::string &s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception &) {
        throw DomainError("not an integer: '" + s + "'");
    }
    if (used != s.size()) {
        throw DomainError("not an integer: '" + s + "'");
    }
    return v;
}

std::vector<Strategy> parse_strategies(const std::string &text) {
    std::vector<Strategy> out;
    for (const auto &part : split(text, ',')) {
        const Strategy s = parse_strategy(part);
        if (std::find(out.begin(), out.end(), s) == out.end()) {
            out.push_back(s);
        }
    }
    if (out.empty()) {
        throw DomainError("no strategy given");
    }
    return out;
}

std::string resolve_output(const std::string &requested, const std::string &fallback) {
    fs::path p = requested.empty() ? fs::path(fallback) : fs::path(requested);
    if (p.is_relative()) {
        if (const char *dir = std::getenv(kOutDirVar); dir != nullptr && *dir != '\0') {
            p = fs::path(dir) / p;
        }
    }
    return fs::absolute(p).lexically_normal().string();
}

void write_file(const std::string &path, const std::string &content) {
    const fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    f << content;
    f.flush();
    if (!f) {
        throw IoError("failed writing '" + path + "'");
    }
}

std::string read_file(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::string> strip_option(const std::vector<std::string> &argv,
                                      const std::string &name) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == name) {
            ++i; // drop the value as well
            continue;
        }
        if (argv[i].rfind(name + "=", 0) == 0) {
            continue;
        }
        out.push_back(argv[i]);
    }
    return out;
}

std::string pm(const EstimateWithError &e) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << e.mean;
    if (!e.exact()) {
        s << " +- " << std::setprecision(4) << e.std_error;
    }
    return s.str();
}

void print_table(const SweepTable &t, std::ostream &out) {
    if (t.rows.empty()) {
        return;
    }
    out << std::left << std::setw(10) << t.axis;
    for (const auto &e : t.rows.front().entries) {
        out << std::setw(20) << e.strategy;
    }
    out << '\n';
    for (const auto &row : t.rows) {
        out << std::setw(10) << format_real(row.axis_value);
        for (const auto &e : row.entries) {
            out << std::setw(20) << pm(e);
        }
        out << '\n';
    }
    out << std::right;
}

std::string render_table(const SweepTable &t, const std::string &format) {
    std::ostringstream s;
    if (format == "json") {
        s << sweep_to_json(t).dump(2) << '\n';
    } else {
        write_sweep_csv(t, s);
    }
    return s.str();
}

SweepOptions sweep_options(const Params &p, const Common &c) {
    return {p.trials, p.epsilon, c.seed, c.threads};
}

EstimateWithError exact_entry(std::string name, double value, int n, double c2,
                              std::optional<int> k) {
    EstimateWithError e;
    e.strategy = std::move(name);
    e.mean = value;
    e.n = n;
    e.c_squared = c2;
    e.k = k;
    return e;
}

// ---------------------------------------------------------------------------
// subcommands; each returns the files it wrote

using Outputs = std::vector<std::string>;

Outputs cmd_trial(const Params &p, const Common &c, std::ostream &out) {
    const Strategy strategy = parse_strategy(p.strategy);
    SourceConfig cfg{p.n, p.k.value_or(1), p.c2};
    if (!p.k) {
        RandomStream pick(derive_seed(c.seed, 0x6b));
        cfg.k = static_cast<int>(pick.uniform_int(1, p.n));
    }
    cfg.validate();
    RandomStream rng(c.seed);
    const TrialRecord rec = run_strategy(strategy, cfg, rng, p.epsilon);

    const std::string path =
        resolve_output(c.out, "trial." + c.format);
    std::ostringstream s;
    if (c.format == "json") {
        ordered_json j;
        j["strategy"] = std::string(to_string(strategy));
        j["n"] = cfg.n;
        j["c_squared"] = cfg.c_squared;
        j["k"] = cfg.k;
        j["seed"] = c.seed;
        j["epsilon"] = p.epsilon;
        auto outcomes = ordered_json::array();
        for (Outcome r : rec.outcomes) {
            outcomes.push_back(to_int(r));
        }
        j["outcomes"] = outcomes;
        auto bases = ordered_json::array();
        for (const auto &b : rec.bases) {
            bases.push_back({b.pi_0.m00, b.pi_0.m01, b.pi_0.m11});
        }
        j["bases_pi0"] = bases;
        auto priors = ordered_json::array();
        for (const auto &prior : rec.prior_history) {
            priors.push_back(prior.eta);
        }
        j["priors"] = priors;
        j["guess"] = rec.guess;
        j["success"] = rec.success;
        j["discarded_outcomes"] = rec.discarded_outcomes;
        s << j.dump(2) << '\n';
    } else {
        s << "step,outcome,pi0_hh,pi0_hv,pi0_vv";
        const bool bi = !rec.prior_history.empty();
        if (bi) {
            for (int k = 1; k <= cfg.n; ++k) {
                s << ",eta_" << k;
            }
        }
        s << '\n';
        for (int step = 0; step <= cfg.n; ++step) {
            s << step << ',';
            if (step > 0) {
                const auto idx = static_cast<std::size_t>(step - 1);
                const auto &b = rec.bases[idx].pi_0;
                s << to_int(rec.outcomes[idx]) << ',' << format_real(b.m00) << ','
                  << format_real(b.m01) << ',' << format_real(b.m11);
            } else {
                s << ",,,";
            }
            if (bi) {
                for (double v : rec.prior_history[static_cast<std::size_t>(step)].eta) {
                    s << ',' << format_real(v);
                }
            }
            s << '\n';
        }
    }
    write_file(path, s.str());
    out << to_string(strategy) << " trial n=" << cfg.n << " c2=" << format_real(cfg.c_squared)
        << " k=" << cfg.k << ": guess " << rec.guess << (rec.success ? " (correct)" : " (wrong)")
        << '\n';
    if (!rec.prior_history.empty()) {
        const auto &last = rec.prior_history.back();
        out << "final prior at guess: " << format_real(last[rec.guess]) << '\n';
    }
    out << "wrote " << path << '\n';
    return {path};
}

Outputs write_table(const SweepTable &t, const std::string &name, const Common &c,
                    std::ostream &out) {
    const std::string path = resolve_output(c.out, name + "." + c.format);
    write_file(path, render_table(t, c.format));
    print_table(t, out);
    out << "wrote " << path << '\n';
    return {path};
}

Outputs cmd_sweep_k(const Params &p, const Common &c, std::ostream &out) {
    const auto t = sweep_k(parse_strategies(p.strategies), p.n, p.c2, sweep_options(p, c));
    return write_table(t, "sweep_k", c, out);
}

Outputs cmd_sweep_overlap(const Params &p, const Common &c, std::ostream &out) {
    const auto t = sweep_overlap(parse_strategies(p.strategies), p.n, parse_grid(p.grid),
                                 sweep_options(p, c));
    return write_table(t, "sweep_overlap", c, out);
}

Outputs cmd_sweep_n(const Params &p, const Common &c, std::ostream &out) {
    const auto t = sweep_n(parse_int_list(p.n_values), p.c2, sweep_options(p, c));
    return write_table(t, "sweep_n", c, out);
}

Outputs cmd_distances(const Params &p, const Common &c, std::ostream &out) {
    const auto t = distance_table(p.n, parse_grid(p.grid), sweep_options(p, c));
    return write_table(t, "distances", c, out);
}

Outputs cmd_exact(const Params &p, const Common &c, std::ostream &out) {
    const int n = p.exact_n;
    const auto bi = exact_bi_success_all(n, p.c2);
    const double srm = srm_optimal_probability(n, p.c2);
    SweepTable t;
    t.axis = "k";
    t.strategies = {"BI_exact", "BL_exact", "SRM", "SRM_avg"};
    const auto srm_k = srm_conditional_success(n, p.c2);
    t.master_seed = c.seed;
    for (int k = 1; k <= n; ++k) {
        SweepRow row;
        row.axis_value = k;
        row.entries.push_back(exact_entry("BI_exact", bi[static_cast<std::size_t>(k - 1)], n, p.c2, k));
        row.entries.push_back(exact_entry("BL_exact", exact_bl_success(n, p.c2, k), n, p.c2, k));
        row.entries.push_back(exact_entry("SRM", srm_k[static_cast<std::size_t>(k - 1)], n, p.c2, k));
        row.entries.push_back(exact_entry("SRM_avg", srm, n, p.c2, std::nullopt));
        t.rows.push_back(std::move(row));
    }
    Outputs files = write_table(t, "exact", c, out);
    out << "k-averaged: BI " << format_real(k_average(bi)) << ", BL "
        << format_real(bl_success_closed_form(n, p.c2)) << ", SRM " << format_real(srm)
        << '\n';
    return files;
}

TimingConfig timing_for(const Params &p) {
    TimingConfig t = p.timing;
    t.n_bins = p.n;
    return t;
}

EmissionRates rates_for(const Params &p) {
    EmissionRates r = p.rates;
    r.statistics = p.pair_stats == "poisson" ? PairStatistics::poisson : PairStatistics::fixed;
    return r;
}

Outputs cmd_pipeline_generate(const Params &p, const Common &c, std::ostream &out) {
    const TimingConfig timing = timing_for(p);
    SourceConfig src{p.n, p.k.value_or(1), p.c2};
    if (!p.k) {
        RandomStream pick(derive_seed(c.seed, 0x6b));
        src.k = static_cast<int>(pick.uniform_int(1, p.n));
    }
    const BinaryMeasurement meas = p.basis == "helstrom"
                                       ? helstrom_measurement(0.5, 0.5, p.c2)
                                       : BinaryMeasurement::computational();
    RandomStream rng(c.seed);
    const GeneratedStream g = generate_stream(
        timing, src, [&](int, int) { return meas; }, rates_for(p), rng, p.frames);

    const std::string path = resolve_output(c.out, "events.csv");
    const std::string planted_path = path + ".planted.csv";
    std::ostringstream events;
    write_events_csv(g.events, events);
    write_file(path, events.str());

    std::vector<BinOutcome> planted;
    for (std::size_t i = 0; i < g.planted.size(); ++i) {
        planted.push_back({static_cast<int>(i) / p.n, static_cast<int>(i) % p.n + 1,
                           g.planted[i], std::nullopt});
    }
    std::ostringstream pl;
    write_bin_outcomes_csv(planted, pl);
    write_file(planted_path, pl.str());
    out << "generated " << g.events.size() << " events over " << p.frames
        << " frame(s), k=" << src.k << '\n'
        << "wrote " << path << "\nwrote " << planted_path << '\n';
    return {path, planted_path};
}

Outputs cmd_pipeline_postselect(const Params &p, const Common &c, std::ostream &out) {
    std::ifstream in(p.input, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + p.input + "'");
    }
    const auto events = read_events_csv(in);
    const auto bins = postselect_bins(events, timing_for(p));
    const std::string path = resolve_output(c.out, "bins." + c.format);
    std::ostringstream s;
    if (c.format == "json") {
        auto arr = ordered_json::array();
        for (const auto &b : bins) {
            ordered_json j;
            j["trigger"] = b.trigger_index;
            j["bin"] = b.bin_index;
            j["outcome"] = b.outcome == BinResult::empty ? ordered_json("empty")
                                                         : ordered_json(b.outcome == BinResult::one ? 1 : 0);
            j["timestamp_ns"] = b.selected_timestamp ? ordered_json(*b.selected_timestamp)
                                                     : ordered_json(nullptr);
            arr.push_back(j);
        }
        s << arr.dump(2) << '\n';
    } else {
        write_bin_outcomes_csv(bins, s);
    }
    write_file(path, s.str());
    const auto empty = std::count_if(bins.begin(), bins.end(), [](const BinOutcome &b) {
        return b.outcome == BinResult::empty;
    });
    out << bins.size() << " bins, " << empty << " empty\nwrote " << path << '\n';
    return {path};
}

Outputs cmd_pipeline_run(const Params &p, const Common &c, std::ostream &out) {
    const TimingConfig timing = timing_for(p);
    const EmissionRates rates = rates_for(p);
    SweepTable t;
    t.axis = "c_squared";
    t.master_seed = c.seed;
    SweepRow row;
    row.axis_value = p.c2;
    for (Strategy s : parse_strategies(p.strategies)) {
        const std::uint64_t seed = derive_seed(c.seed, s == Strategy::bl ? 1U : 2U);
        EstimateWithError e =
            simulate_stream_success(s, timing, p.n, p.c2, p.k, rates, p.trials, seed, c.threads);
        t.strategies.push_back(e.strategy);
        out << e.strategy << ": " << e.invalid << " invalid trial(s)\n";
        row.entries.push_back(std::move(e));
    }
    t.rows.push_back(std::move(row));
    return write_table(t, "pipeline_run", c, out);
}

// ---------------------------------------------------------------------------
// manifest

ordered_json collect_parameters(const CLI::App *sub) {
    ordered_json params = ordered_json::object();
    for (const CLI::Option *opt : sub->get_options()) {
        if (opt == sub->get_help_ptr() || opt->get_lnames().empty()) {
            continue;
        }
        std::string value;
        if (opt->count() > 0) {
            const auto &res = opt->results();
            for (std::size_t i = 0; i < res.size(); ++i) {
                value += (i > 0 ? "," : "") + res[i];
            }
        } else {
            value = opt->get_default_str();
        }
        params[opt->get_lnames().front()] = value;
    }
    return params;
}

void write_manifest(const std::string &subcommand, const CLI::App *sub,
                    std::vector<std::string> argv, const Common &c,
                    const Outputs &files, double seconds) {
    argv = strip_option(argv, "--out");
    argv.push_back("--out");
    argv.push_back(files.front());
    ordered_json m;
    m["subcommand"] = subcommand;
    m["version"] = QCPD_VERSION;
    m["argv"] = argv;
    m["parameters"] = collect_parameters(sub);
    m["master_seed"] = c.seed;
    m["threads"] = c.threads;
    m["outputs"] = files;
    m["duration_seconds"] = seconds;
    write_file(manifest_path(files.front()), m.dump(2) + "\n");
}

int cmd_replay(const Params &p, std::ostream &out, std::ostream &err) {
    ordered_json m;
    try {
        m = ordered_json::parse(read_file(p.manifest));
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("invalid manifest: ") + e.what(), 0);
    }
    if (!m.contains("argv") || !m.contains("outputs") || m["outputs"].empty()) {
        throw ParseError("manifest lacks argv or outputs", 0);
    }
    std::vector<std::string> argv;
    std::vector<std::string> outputs;
    try {
        argv = m["argv"].get<std::vector<std::string>>();
        outputs = m["outputs"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("invalid manifest: ") + e.what(), 0);
    }
    if (!argv.empty() && argv.front() == "replay") {
        throw ParseError("manifest refers to another replay", 0);
    }

    std::string dir = p.out_dir;
    if (dir.empty() && p.verify) {
        std::random_device rd;
        dir = (fs::temp_directory_path() /
               ("qcpd-replay-" + std::to_string(rd()) + std::to_string(rd())))
                  .string();
    }
    auto target_of = [&](const std::string &original) {
        return dir.empty() ? original : (fs::absolute(dir) / fs::path(original).filename()).string();
    };

    argv = strip_option(argv, "--out");
    if (p.replay_threads) {
        argv = strip_option(argv, "--threads");
        argv.push_back("--threads");
        argv.push_back(std::to_string(*p.replay_threads));
    }
    argv.push_back("--out");
    argv.push_back(target_of(outputs.front()));

    std::ostringstream inner;
    const int code = run_cli(argv, inner, err);
    out << inner.str();
    if (code != exit_ok || !p.verify) {
        return code;
    }
    bool same = true;
    for (const auto &original : outputs) {
        const bool eq = read_file(original) == read_file(target_of(original));
        out << (eq ? "identical: " : "DIFFERS: ") << original << '\n';
        same = same && eq;
    }
    if (p.out_dir.empty()) {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    return same ? exit_ok : exit_failure;
}

// ---------------------------------------------------------------------------
// option wiring

void add_common(CLI::App *sub, Common &c, bool with_format, bool with_threads) {
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    if (with_threads) {
        sub->add_option("--threads", c.threads,
                        "Worker threads (0 = all cores); never changes results")
            ->capture_default_str()
            ->check(CLI::NonNegativeNumber);
    }
    sub->add_option("--out", c.out,
                    "Output file; relative paths resolve against $QCPD_OUT_DIR when set");
    if (with_format) {
        sub->add_option("--format", c.format, "Output format")
            ->capture_default_str()
            ->check(CLI::IsMember({"csv", "json"}));
    }
}

void add_model(CLI::App *sub, Params &p, bool with_k) {
    sub->add_option("--n", p.n, "Sequence length")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--c2", p.c2, "Overlap c^2 = |<H|phi>|^2")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    if (with_k) {
        sub->add_option("--k", p.k, "Change point (default: drawn uniformly)")
            ->check(CLI::PositiveNumber);
    }
}

void add_mc(CLI::App *sub, Params &p) {
    sub->add_option("--trials", p.trials, "Monte Carlo trials per point")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", p.epsilon, "Readout flip probability")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
}

void add_strategies(CLI::App *sub, Params &p) {
    sub->add_option("--strategy", p.strategies, "Comma list of strategies (bl, bi)")
        ->capture_default_str();
}

void add_timing(CLI::App *sub, Params &p) {
    sub->add_option("--trigger-interval-ns", p.timing.trigger_interval, "Trigger period")
        ->capture_default_str();
    sub->add_option("--chopper-period-ns", p.timing.chopper_period, "Chopper period")
        ->capture_default_str();
    sub->add_option("--bin-width-ns", p.timing.bin_width, "Time bin width")
        ->capture_default_str();
    sub->add_option("--window-ns", p.timing.coincidence_window, "Coincidence window")
        ->capture_default_str();
}

void add_rates(CLI::App *sub, Params &p) {
    sub->add_option("--pairs-per-bin", p.rates.pairs_per_bin, "Mean heralded pairs per bin")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--background-per-ms", p.rates.background_per_ms,
                    "Background singles per channel per ms")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--pair-stats", p.pair_stats, "Pairs per bin: fixed or poisson")
        ->capture_default_str()
        ->check(CLI::IsMember({"fixed", "poisson"}));
}

} // namespace

std::vector<double> parse_grid(const std::string &text) {
    if (text == "default") {
        return default_overlap_grid();
    }
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) {
            throw DomainError("range must be start:stop:step");
        }
        const double start = to_double(parts[0]);
        const double stop = to_double(parts[1]);
        const double step = to_double(parts[2]);
        if (!(step > 0.0) || stop < start) {
            throw DomainError("range needs step > 0 and stop >= start");
        }
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= count; ++i) {
            // Round to 12 digits so 0.1 * 3 prints as 0.3.
            const double v = start + static_cast<double>(i) * step;
            grid.push_back(std::round(v * 1e12) / 1e12);
        }
    } else {
        for (const auto &part : split(text, ',')) {
            grid.push_back(to_double(part));
        }
    }
    if (grid.empty()) {
        throw DomainError("empty grid");
    }
    for (double v : grid) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("grid value " + format_real(v) + " outside [0, 1]");
        }
    }
    return grid;
}

std::vector<int> parse_int_list(const std::string &text) {
    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) {
            throw DomainError("range must be start:stop:step");
        }
        const int start = parse_int_text(parts[0]);
        const int stop = parse_int_text(parts[1]);
        const int step = parse_int_text(parts[2]);
        if (step <= 0 || stop < start) {
            throw DomainError("range needs step > 0 and stop >= start");
        }
        for (int v = start; v <= stop; v += step) {
            out.push_back(v);
        }
    } else {
        for (const auto &part : split(text, ',')) {
            out.push_back(parse_int_text(part));
        }
    }
    if (out.empty()) {
        throw DomainError("empty list");
    }
    for (int v : out) {
        if (v < 1) {
            throw DomainError("list values must be >= 1");
        }
    }
    return out;
}

std::string manifest_path(const std::string &output) { return output + ".manifest.json"; }

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum change-point detection: strategies, sweeps and event pipeline",
                 "qcpd"};
    app.require_subcommand(1);
    app.footer(std::string("Environment:\n  ") + kOutDirVar +
               "  directory for relative --out paths (default: current directory)\n"
               "Every run writes <out>.manifest.json; `qcpd replay` re-runs it.\n"
               "Exit codes: 0 ok, 1 failure, 2 usage, 3 I/O, 4 parse.");
    app.set_version_flag("--version", QCPD_VERSION);

    Params p;
    Common c;

    auto *trial = app.add_subcommand("trial", "One seeded trial with its prior trajectory");
    add_model(trial, p, true);
    trial->add_option("--strategy", p.strategy, "bl or bi")->capture_default_str();
    trial->add_option("--epsilon", p.epsilon, "Readout flip probability")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    add_common(trial, c, true, false);

    auto *sk = app.add_subcommand("sweep-k", "Success probability per change point k");
    add_model(sk, p, false);
    add_mc(sk, p);
    add_strategies(sk, p);
    add_common(sk, c, true, true);

    auto *so = app.add_subcommand("sweep-overlap", "k-averaged success versus c^2");
    so->add_option("--n", p.n, "Sequence length")->capture_default_str()->check(CLI::PositiveNumber);
    so->add_option("--grid", p.grid, "c^2 grid: default, list a,b,c or range start:stop:step")
        ->capture_default_str();
    add_mc(so, p);
    add_strategies(so, p);
    add_common(so, c, true, true);

    auto *sn = app.add_subcommand("sweep-n", "BI and BL success and their difference versus n");
    sn->add_option("--n", p.n_values, "List or range of sequence lengths")->capture_default_str();
    sn->add_option("--c2", p.c2, "Overlap c^2")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    add_mc(sn, p);
    add_common(sn, c, true, true);

    auto *dist = app.add_subcommand("distances", "BI-BL improvement and SRM-BI gap versus c^2");
    dist->add_option("--n", p.n, "Sequence length")->capture_default_str()->check(CLI::PositiveNumber);
    dist->add_option("--grid", p.grid, "c^2 grid")->capture_default_str();
    add_mc(dist, p);
    add_common(dist, c, true, true);

    auto *exact = app.add_subcommand("exact", "Exact per-k success by enumeration (n <= 16)");
    exact->add_option("--n", p.exact_n, "Sequence length")
        ->capture_default_str()
        ->check(CLI::Range(1, kMaxExactN));
    exact->add_option("--c2", p.c2, "Overlap c^2")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    add_common(exact, c, true, false);

    auto *pipe = app.add_subcommand("pipeline", "Time-tagged event pipeline");
    pipe->require_subcommand(1);
    auto *gen = pipe->add_subcommand("generate", "Write a synthetic event stream");
    add_model(gen, p, true);
    gen->add_option("--frames", p.frames, "Trigger frames")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--basis", p.basis, "Basis for every bin: hv or helstrom (equal weights)")
        ->capture_default_str()
        ->check(CLI::IsMember({"hv", "helstrom"}));
    add_rates(gen, p);
    add_timing(gen, p);
    add_common(gen, c, false, false);

    auto *post = pipe->add_subcommand("postselect", "Bin outcomes of an event file");
    post->add_option("--input", p.input, "Event CSV (channel,timestamp_ns)")->required();
    post->add_option("--n", p.n, "Time bins per trigger")->capture_default_str()->check(CLI::PositiveNumber);
    add_timing(post, p);
    add_common(post, c, true, false);

    auto *run = pipe->add_subcommand("run", "Monte Carlo trials driven through the event layer");
    add_model(run, p, true);
    add_mc(run, p);
    add_strategies(run, p);
    add_rates(run, p);
    add_timing(run, p);
    add_common(run, c, true, true);

    auto *rep = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    rep->add_option("manifest", p.manifest, "Manifest JSON")->required();
    rep->add_option("--out-dir", p.out_dir, "Write outputs here instead of the original paths");
    rep->add_option("--threads", p.replay_threads, "Override the thread count");
    rep->add_flag("--verify", p.verify, "Compare regenerated files with the originals");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    struct Route {
        CLI::App *sub;
        std::string name;
        Outputs (*fn)(const Params &, const Common &, std::ostream &);
    };
    const Route routes[] = {
        {trial, "trial", cmd_trial},
        {sk, "sweep-k", cmd_sweep_k},
        {so, "sweep-overlap", cmd_sweep_overlap},
        {sn, "sweep-n", cmd_sweep_n},
        {dist, "distances", cmd_distances},
        {exact, "exact", cmd_exact},
        {gen, "pipeline generate", cmd_pipeline_generate},
        {post, "pipeline postselect", cmd_pipeline_postselect},
        {run, "pipeline run", cmd_pipeline_run},
    };

    try {
        if (rep->parsed()) {
            return cmd_replay(p, out, err);
        }
        for (const Route &r : routes) {
            if (!r.sub->parsed()) {
                continue;
            }
            const auto start = std::chrono::steady_clock::now();
            const Outputs files = r.fn(p, c, out);
            const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
            write_manifest(r.name, r.sub, args, c, files, took.count());
            return exit_ok;
        }
        err << "error: no subcommand\n";
        return exit_usage;
    } catch (const ParseError &e) {
        err << "parse error: " << e.what() << '\n';
        return exit_parse;
    } catch (const IoError &e) {
        err << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const DomainError &e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ResourceError &e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

} // namespace qcpd::cli
