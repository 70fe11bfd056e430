#include "qcpd/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "qcpd/errors.hpp"
#include "qcpd/kernels.hpp"

namespace qcpd {

namespace {

// Stream tags; changing them changes every published number.
constexpr std::uint64_t kTagSimulate = 0x53494d55ULL;
constexpr std::uint64_t kTagSweepK = 0x4b535750ULL;
constexpr std::uint64_t kTagSweepOverlap = 0x4f535750ULL;
constexpr std::uint64_t kTagSweepN = 0x4e535750ULL;

std::uint64_t strategy_tag(Strategy s) { return s == Strategy::bl ? 1U : 2U; }

std::uint64_t value_tag(double v) { return std::bit_cast<std::uint64_t>(v); }

EstimateWithError exact_entry(std::string name, double value, int n,
                              double c_squared, std::optional<int> k) {
    EstimateWithError e;
    e.strategy = std::move(name);
    e.mean = value;
    e.n = n;
    e.c_squared = c_squared;
    e.k = k;
    return e;
}

EstimateWithError difference(std::string name, const EstimateWithError &a,
                             const EstimateWithError &b) {
    EstimateWithError d = a;
    d.strategy = std::move(name);
    d.mean = a.mean - b.mean;
    d.std_error = std::hypot(a.std_error, b.std_error);
    d.trials = std::max(a.trials, b.trials);
    d.invalid = a.invalid + b.invalid;
    d.seed = 0;
    return d;
}

void check_trials(std::int64_t trials) {
    if (trials < 1) {
        throw DomainError("trial count must be >= 1");
    }
}

} // namespace

EstimateWithError estimate_from_counts(std::int64_t successes,
                                       std::int64_t trials) {
    EstimateWithError e;
    e.trials = trials;
    if (trials > 0) {
        e.mean = static_cast<double>(successes) / static_cast<double>(trials);
        e.std_error =
            std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(trials));
    }
    return e;
}

double bootstrap_std_error(double mean, std::int64_t trials, int resamples,
                           std::uint64_t seed) {
    if (trials < 1 || resamples < 2) {
        throw DomainError("bootstrap needs trials >= 1 and resamples >= 2");
    }
    RandomStream rng(seed);
    std::binomial_distribution<std::int64_t> draw(trials,
                                                  std::clamp(mean, 0.0, 1.0));
    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (double &m : means) {
        m = static_cast<double>(draw(rng.engine())) / static_cast<double>(trials);
    }
    const double centre =
        std::accumulate(means.begin(), means.end(), 0.0) / resamples;
    double ss = 0.0;
    for (double m : means) {
        ss += (m - centre) * (m - centre);
    }
    return std::sqrt(ss / (resamples - 1));
}

TrialCounts
run_trials(std::int64_t trials, std::uint64_t stream_seed, int threads,
           const std::function<TrialVerdict(std::int64_t, RandomStream &)> &trial) {
    check_trials(trials);
    if (threads <= 0) {
        threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    }
    const auto workers =
        static_cast<std::int64_t>(std::min<std::int64_t>(threads, trials));

    auto run_range = [&](std::int64_t begin, std::int64_t end) {
        TrialCounts c;
        for (std::int64_t i = begin; i < end; ++i) {
            RandomStream rng(derive_seed(stream_seed, static_cast<std::uint64_t>(i)));
            switch (trial(i, rng)) {
            case TrialVerdict::success: ++c.successes; break;
            case TrialVerdict::failure: ++c.failures; break;
            case TrialVerdict::invalid: ++c.invalid; break;
            }
        }
        return c;
    };

    if (workers == 1) {
        return run_range(0, trials);
    }
    std::vector<TrialCounts> partial(static_cast<std::size_t>(workers));
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (std::int64_t w = 0; w < workers; ++w) {
            const std::int64_t begin = trials * w / workers;
            const std::int64_t end = trials * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                partial[static_cast<std::size_t>(w)] = run_range(begin, end);
            });
        }
    }
    TrialCounts total;
    for (const TrialCounts &c : partial) {
        total.successes += c.successes;
        total.failures += c.failures;
        total.invalid += c.invalid;
    }
    return total;
}

EstimateWithError simulate_success(Strategy strategy, int n, double c_squared,
                                   std::optional<int> k, std::int64_t trials,
                                   std::uint64_t seed,
                                   const SimulationOptions &opts) {
    check_trials(trials);
    SourceConfig base{n, k.value_or(1), c_squared};
    base.validate();
    (void)apply_outcome_noise({1.0, 0.0}, opts.epsilon);

    const std::uint64_t stream = derive_seed(seed, {kTagSimulate, strategy_tag(strategy)});
    const TrialCounts counts = run_trials(
        trials, stream, opts.threads, [&](std::int64_t, RandomStream &rng) {
            SourceConfig cfg = base;
            if (!k) {
                cfg.k = static_cast<int>(rng.uniform_int(1, n));
            }
            return sample_guess(strategy, cfg, rng, opts.epsilon) == cfg.k
                       ? TrialVerdict::success
                       : TrialVerdict::failure;
        });

    EstimateWithError e = estimate_from_counts(counts.successes,
                                               counts.successes + counts.failures);
    e.strategy = std::string(to_string(strategy));
    e.n = n;
    e.c_squared = c_squared;
    e.k = k;
    e.epsilon = opts.epsilon;
    e.seed = seed;
    return e;
}

// ---------------------------------------------------------------------------
// Exhaustive oracles

namespace {

class BiEnumerator {
  public:
    BiEnumerator(int n, double c_squared)
        : n_(n), c_squared_(c_squared), phi_(make_mutated_state(c_squared)),
          success_(static_cast<std::size_t>(n), 0.0) {
        const auto size = static_cast<std::size_t>(n);
        priors_.assign(static_cast<std::size_t>(n) + 1,
                       PriorVector{std::vector<double>(size), 1});
        weights_.assign(static_cast<std::size_t>(n) + 1,
                        std::vector<double>(size, 1.0));
        priors_[0] = PriorVector::uniform(n);
    }

    std::vector<double> run() {
        descend(0);
        return success_;
    }

  private:
    // depth = number of outcomes fixed so far; priors_[depth] is the prior
    // before photon depth + 1, weights_[depth][k-1] = P(outcomes so far | k).
    void descend(int depth) {
        const auto d = static_cast<std::size_t>(depth);
        if (depth == n_) {
            const int guess = guess_from_prior(priors_[d]);
            success_[static_cast<std::size_t>(guess - 1)] +=
                weights_[d][static_cast<std::size_t>(guess - 1)];
            return;
        }
        const HypothesisWeights hw = bi_hypothesis_weights(priors_[d]);
        const BinaryMeasurement meas =
            helstrom_measurement(hw.p_h, hw.p_phi, c_squared_);
        const auto p_h = outcome_probabilities(QubitState::horizontal(), meas);
        const auto p_phi = outcome_probabilities(phi_, meas);
        for (const Outcome r : {Outcome::zero, Outcome::one}) {
            std::vector<double> &w = weights_[d + 1];
            w = weights_[d];
            const double mass =
                kernels::scale_split(w, d + 1, p_phi.of(r), p_h.of(r));
            if (!(mass > 0.0)) {
                continue; // probability zero under every hypothesis
            }
            priors_[d + 1] = priors_[d];
            bi_update_in_place(priors_[d + 1], r, meas, c_squared_);
            descend(depth + 1);
        }
    }

    int n_;
    double c_squared_;
    QubitState phi_;
    std::vector<double> success_;
    std::vector<PriorVector> priors_;
    std::vector<std::vector<double>> weights_;
};

} // namespace

std::vector<double> exact_bi_success_all(int n, double c_squared) {
    SourceConfig{n, 1, c_squared}.validate();
    if (n > kMaxExactN) {
        throw ResourceError("exact enumeration is limited to n <= " +
                            std::to_string(kMaxExactN));
    }
    return BiEnumerator(n, c_squared).run();
}

double exact_bi_success(int n, double c_squared, int k) {
    SourceConfig{n, k, c_squared}.validate();
    return exact_bi_success_all(n, c_squared)[static_cast<std::size_t>(k - 1)];
}

double exact_bl_success(int n, double c_squared, int k) {
    SourceConfig{n, k, c_squared}.validate();
    return k == n ? 1.0 : 1.0 - c_squared;
}

double k_average(const std::vector<double> &per_k) {
    if (per_k.empty()) {
        throw DomainError("k_average of an empty vector");
    }
    return std::accumulate(per_k.begin(), per_k.end(), 0.0) /
           static_cast<double>(per_k.size());
}

// ---------------------------------------------------------------------------
// Sweeps

const EstimateWithError &SweepRow::at(const std::string &strategy) const {
    for (const auto &e : entries) {
        if (e.strategy == strategy) {
            return e;
        }
    }
    throw DomainError("sweep row has no entry '" + strategy + "'");
}

std::vector<double> default_overlap_grid() {
    std::vector<double> grid{0.01};
    for (int i = 1; i <= 19; ++i) {
        grid.push_back(0.05 * i);
    }
    grid.push_back(0.99);
    return grid;
}

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

EstimateWithError mc_entry(Strategy strategy, int n, double c_squared,
                           std::optional<int> k, const SweepOptions &opts,
                           std::uint64_t row_seed) {
    EstimateWithError e = simulate_success(strategy, n, c_squared, k,
                                           opts.trials, row_seed,
                                           {opts.epsilon, opts.threads});
    return e;
}

} // namespace

SweepTable sweep_k(const std::vector<Strategy> &strategies, int n,
                   double c_squared, const SweepOptions &opts) {
    SourceConfig{n, 1, c_squared}.validate();
    check_trials(opts.trials);
    SweepTable table;
    table.axis = "k";
    table.master_seed = opts.master_seed;
    for (Strategy s : strategies) {
        table.strategies.emplace_back(to_string(s));
    }
    table.strategies.emplace_back("SRM");
    table.strategies.emplace_back("SRM_avg");
    const std::vector<double> srm_k = srm_conditional_success(n, c_squared);
    const double srm = srm_optimal_probability(n, c_squared);
    for (int k = 1; k <= n; ++k) {
        SweepRow row;
        row.axis_value = k;
        for (Strategy s : strategies) {
            const std::uint64_t seed = derive_seed(
                opts.master_seed,
                {kTagSweepK, static_cast<std::uint64_t>(n), value_tag(c_squared),
                 static_cast<std::uint64_t>(k), strategy_tag(s)});
            row.entries.push_back(mc_entry(s, n, c_squared, k, opts, seed));
        }
        row.entries.push_back(exact_entry(
            "SRM", srm_k[static_cast<std::size_t>(k - 1)], n, c_squared, k));
        row.entries.push_back(exact_entry("SRM_avg", srm, n, c_squared, std::nullopt));
        table.rows.push_back(std::move(row));
    }
    return table;
}

SweepTable sweep_overlap(const std::vector<Strategy> &strategies, int n,
                         const std::vector<double> &grid,
                         const SweepOptions &opts) {
    check_trials(opts.trials);
    SweepTable table;
    table.axis = "c_squared";
    table.master_seed = opts.master_seed;
    const bool with_bl = std::find(strategies.begin(), strategies.end(),
                                   Strategy::bl) != strategies.end();
    for (Strategy s : strategies) {
        table.strategies.emplace_back(to_string(s));
    }
    if (with_bl) {
        table.strategies.emplace_back("BL_theory");
    }
    table.strategies.emplace_back("SRM");
    for (double c2 : sorted_unique(grid)) {
        SourceConfig{n, 1, c2}.validate();
        SweepRow row;
        row.axis_value = c2;
        for (Strategy s : strategies) {
            const std::uint64_t seed = derive_seed(
                opts.master_seed, {kTagSweepOverlap, static_cast<std::uint64_t>(n),
                                   value_tag(c2), strategy_tag(s)});
            row.entries.push_back(mc_entry(s, n, c2, std::nullopt, opts, seed));
        }
        if (with_bl) {
            row.entries.push_back(exact_entry(
                "BL_theory", bl_success_closed_form(n, c2), n, c2, std::nullopt));
        }
        row.entries.push_back(exact_entry("SRM", srm_optimal_probability(n, c2),
                                          n, c2, std::nullopt));
        table.rows.push_back(std::move(row));
    }
    return table;
}

SweepTable sweep_n(const std::vector<int> &n_values, double c_squared,
                   const SweepOptions &opts) {
    check_trials(opts.trials);
    std::vector<int> ns = n_values;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    SweepTable table;
    table.axis = "n";
    table.master_seed = opts.master_seed;
    table.strategies = {"BI", "BL", "BI-BL"};
    for (int n : ns) {
        SourceConfig{n, 1, c_squared}.validate();
        SweepRow row;
        row.axis_value = n;
        auto seed_for = [&](Strategy s) {
            return derive_seed(opts.master_seed,
                               {kTagSweepN, static_cast<std::uint64_t>(n),
                                value_tag(c_squared), strategy_tag(s)});
        };
        const auto bi = mc_entry(Strategy::bi, n, c_squared, std::nullopt, opts,
                                 seed_for(Strategy::bi));
        const auto bl = mc_entry(Strategy::bl, n, c_squared, std::nullopt, opts,
                                 seed_for(Strategy::bl));
        row.entries = {bi, bl, difference("BI-BL", bi, bl)};
        table.rows.push_back(std::move(row));
    }
    return table;
}

SweepTable distance_table(int n, const std::vector<double> &grid,
                          const SweepOptions &opts) {
    const SweepTable base =
        sweep_overlap({Strategy::bl, Strategy::bi}, n, grid, opts);
    SweepTable table;
    table.axis = "c_squared";
    table.master_seed = opts.master_seed;
    table.strategies = {"BI", "BL", "SRM", "BI-BL", "SRM-BI"};
    for (const SweepRow &src : base.rows) {
        const auto &bi = src.at("BI");
        const auto &bl = src.at("BL");
        const auto &srm = src.at("SRM");
        SweepRow row;
        row.axis_value = src.axis_value;
        row.entries = {bi, bl, srm, difference("BI-BL", bi, bl),
                       difference("SRM-BI", srm, bi)};
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace qcpd
