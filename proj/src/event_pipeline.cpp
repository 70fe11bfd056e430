#include "qcpd/event_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "qcpd/errors.hpp"

namespace qcpd {

std::string_view channel_code(Channel c) noexcept {
    switch (c) {
    case Channel::trigger: return "TRIG";
    case Channel::idler: return "IDLER";
    case Channel::signal_h: return "H";
    case Channel::signal_v: return "V";
    }
    return "?";
}

std::optional<Channel> parse_channel(std::string_view code) noexcept {
    if (code == "TRIG") return Channel::trigger;
    if (code == "IDLER") return Channel::idler;
    if (code == "H") return Channel::signal_h;
    if (code == "V") return Channel::signal_v;
    return std::nullopt;
}

void TimingConfig::validate() const {
    if (trigger_interval <= 0 || chopper_period <= 0 || bin_width <= 0 ||
        coincidence_window <= 0 || n_bins < 1) {
        throw DomainError("timing parameters must be positive");
    }
    if (bin_width > chopper_period) {
        throw DomainError("bin width exceeds the chopper period");
    }
    if (static_cast<Nanoseconds>(n_bins) * chopper_period > trigger_interval) {
        throw DomainError("n_bins chopper periods do not fit in one trigger interval");
    }
}

void EmissionRates::validate() const {
    if (!(pairs_per_bin >= 0.0) || !(background_per_ms >= 0.0)) {
        throw DomainError("emission rates must be non-negative");
    }
}

namespace {

bool any_within(std::span<const Nanoseconds> sorted, Nanoseconds t,
                Nanoseconds window) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t - window + 1);
    return it != sorted.end() && *it < t + window;
}

} // namespace

Effective classify_effective(Nanoseconds idler_t,
                             std::span<const Nanoseconds> h_events,
                             std::span<const Nanoseconds> v_events,
                             Nanoseconds window) {
    const bool h = any_within(h_events, idler_t, window);
    const bool v = any_within(v_events, idler_t, window);
    if (h && !v) {
        return Effective::outcome_zero;
    }
    if (v && !h) {
        return Effective::outcome_one;
    }
    return Effective::not_effective;
}

ChannelIndex ChannelIndex::build(std::span<const DetectionEvent> stream) {
    ChannelIndex idx;
    Nanoseconds last = 0;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const DetectionEvent &e = stream[i];
        if (i > 0 && e.timestamp < last) {
            throw ParseError("event stream is not sorted by timestamp (event " +
                                 std::to_string(i + 1) + ")",
                             0);
        }
        last = e.timestamp;
        switch (e.channel) {
        case Channel::trigger: idx.trigger.push_back(e.timestamp); break;
        case Channel::idler: idx.idler.push_back(e.timestamp); break;
        case Channel::signal_h: idx.h.push_back(e.timestamp); break;
        case Channel::signal_v: idx.v.push_back(e.timestamp); break;
        }
    }
    return idx;
}

BinOutcome select_bin(const ChannelIndex &index, Nanoseconds trigger_t, int s,
                      const TimingConfig &config) {
    const Nanoseconds lo = trigger_t + config.bin_start(s);
    const Nanoseconds hi = lo + config.bin_width;
    const Nanoseconds w = config.coincidence_window;

    // Signal clicks in (lo, hi], merged in time order (H first on ties).
    auto h_it = std::upper_bound(index.h.begin(), index.h.end(), lo);
    auto v_it = std::upper_bound(index.v.begin(), index.v.end(), lo);
    const auto h_end = std::upper_bound(h_it, index.h.end(), hi);
    const auto v_end = std::upper_bound(v_it, index.v.end(), hi);

    BinOutcome out;
    out.bin_index = s;
    while (h_it != h_end || v_it != v_end) {
        Nanoseconds t;
        if (v_it == v_end || (h_it != h_end && *h_it <= *v_it)) {
            t = *h_it++;
        } else {
            t = *v_it++;
        }
        auto idler = std::lower_bound(index.idler.begin(), index.idler.end(), t - w + 1);
        for (; idler != index.idler.end() && *idler < t + w; ++idler) {
            const Effective verdict = classify_effective(*idler, index.h, index.v, w);
            if (verdict != Effective::not_effective) {
                out.outcome = verdict == Effective::outcome_zero ? BinResult::zero
                                                                 : BinResult::one;
                out.selected_timestamp = t;
                return out;
            }
        }
    }
    return out;
}

std::vector<BinOutcome> postselect_bins(std::span<const DetectionEvent> stream,
                                        const TimingConfig &config) {
    config.validate();
    const ChannelIndex index = ChannelIndex::build(stream);
    if (index.trigger.empty()) {
        throw DomainError("event stream contains no trigger");
    }
    std::vector<BinOutcome> result;
    result.reserve(index.trigger.size() * static_cast<std::size_t>(config.n_bins));
    for (std::size_t f = 0; f < index.trigger.size(); ++f) {
        for (int s = 1; s <= config.n_bins; ++s) {
            BinOutcome b = select_bin(index, index.trigger[f], s, config);
            b.trigger_index = static_cast<int>(f);
            result.push_back(b);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Synthesis

namespace {

std::int64_t pair_count(const EmissionRates &rates, RandomStream &rng) {
    if (rates.statistics == PairStatistics::poisson) {
        if (rates.pairs_per_bin == 0.0) {
            return 0;
        }
        std::poisson_distribution<std::int64_t> draw(rates.pairs_per_bin);
        return draw(rng.engine());
    }
    const double whole = std::floor(rates.pairs_per_bin);
    const double frac = rates.pairs_per_bin - whole;
    return static_cast<std::int64_t>(whole) + (frac > 0.0 && rng.bernoulli(frac) ? 1 : 0);
}

void append_background(std::vector<DetectionEvent> &out, Nanoseconds frame_start,
                       const TimingConfig &config, const EmissionRates &rates,
                       RandomStream &rng) {
    if (rates.background_per_ms == 0.0) {
        return;
    }
    const double mean = rates.background_per_ms *
                        static_cast<double>(config.trigger_interval) /
                        static_cast<double>(kNanosPerMilli);
    std::poisson_distribution<std::int64_t> draw(mean);
    for (Channel c : {Channel::idler, Channel::signal_h, Channel::signal_v}) {
        const std::int64_t count = draw(rng.engine());
        for (std::int64_t i = 0; i < count; ++i) {
            out.push_back({c, frame_start + rng.uniform_int(0, config.trigger_interval - 1)});
        }
    }
}

// Appends the heralded pairs of bin s and returns the outcome of the
// earliest one (empty if none).
BinResult append_bin_pairs(std::vector<DetectionEvent> &out, Nanoseconds frame_start,
                           int s, const QubitState &truth,
                           const BinaryMeasurement &basis, const TimingConfig &config,
                           const EmissionRates &rates, RandomStream &rng) {
    const OutcomeProbabilities probs = outcome_probabilities(truth, basis);
    const std::int64_t count = pair_count(rates, rng);
    const Nanoseconds jitter = config.coincidence_window - 1;
    BinResult first = BinResult::empty;
    Nanoseconds first_t = 0;
    for (std::int64_t i = 0; i < count; ++i) {
        const Nanoseconds signal_t = frame_start + config.bin_start(s) +
                                     rng.uniform_int(1, config.bin_width);
        const Outcome r = sample_outcome(probs, rng);
        const Nanoseconds idler_t =
            std::max<Nanoseconds>(0, signal_t - rng.uniform_int(-jitter, jitter));
        out.push_back({r == Outcome::zero ? Channel::signal_h : Channel::signal_v, signal_t});
        out.push_back({Channel::idler, idler_t});
        if (first == BinResult::empty || signal_t < first_t) {
            first = r == Outcome::zero ? BinResult::zero : BinResult::one;
            first_t = signal_t;
        }
    }
    return first;
}

void insert_sorted(std::vector<Nanoseconds> &v, Nanoseconds t) {
    v.insert(std::upper_bound(v.begin(), v.end(), t), t);
}

} // namespace

GeneratedStream generate_stream(const TimingConfig &config, const SourceConfig &source,
                                const BasisProvider &basis, const EmissionRates &rates,
                                RandomStream &rng, int frames) {
    config.validate();
    source.validate();
    rates.validate();
    if (source.n != config.n_bins) {
        throw DomainError("source length must equal the number of time bins");
    }
    if (frames < 1) {
        throw DomainError("need at least one frame");
    }
    GeneratedStream g;
    for (int f = 0; f < frames; ++f) {
        const Nanoseconds start = static_cast<Nanoseconds>(f) * config.trigger_interval;
        g.events.push_back({Channel::trigger, start});
        append_background(g.events, start, config, rates, rng);
        for (int s = 1; s <= config.n_bins; ++s) {
            g.planted.push_back(append_bin_pairs(g.events, start, s, source.photon_state(s),
                                                 basis(f, s), config, rates, rng));
        }
    }
    std::stable_sort(g.events.begin(), g.events.end(), event_before);
    return g;
}

TrialRecord run_strategy_on_stream(Strategy strategy, const TimingConfig &config,
                                   const SourceConfig &source, const EmissionRates &rates,
                                   RandomStream &rng) {
    config.validate();
    source.validate();
    rates.validate();
    if (source.n != config.n_bins) {
        throw DomainError("source length must equal the number of time bins");
    }
    TrialRecord rec;
    rec.config = source;
    rec.strategy = strategy;
    rec.seed = rng.seed();

    BayesianAgent bi(source.n, source.c_squared);
    BasicLocalAgent bl(source.n);
    DetectionAgent &agent = strategy == Strategy::bi ? static_cast<DetectionAgent &>(bi)
                                                     : static_cast<DetectionAgent &>(bl);
    if (strategy == Strategy::bi) {
        rec.prior_history.push_back(bi.prior());
    }

    std::vector<DetectionEvent> events{{Channel::trigger, 0}};
    append_background(events, 0, config, rates, rng);
    std::stable_sort(events.begin(), events.end(), event_before);
    ChannelIndex index = ChannelIndex::build(events);

    std::vector<DetectionEvent> fresh;
    for (int s = 1; s <= source.n; ++s) {
        const BinaryMeasurement meas = agent.next_measurement();
        fresh.clear();
        (void)append_bin_pairs(fresh, 0, s, source.photon_state(s), meas, config, rates, rng);
        for (const DetectionEvent &e : fresh) {
            insert_sorted(e.channel == Channel::idler      ? index.idler
                          : e.channel == Channel::signal_h ? index.h
                                                           : index.v,
                          e.timestamp);
        }
        const BinOutcome bin = select_bin(index, 0, s, config);
        if (bin.outcome == BinResult::empty) {
            throw InvalidTrialError(s);
        }
        const Outcome r = bin.outcome == BinResult::zero ? Outcome::zero : Outcome::one;
        if (!agent.observe(r, true)) {
            ++rec.discarded_outcomes;
        }
        rec.outcomes.push_back(r);
        rec.bases.push_back(meas);
        if (strategy == Strategy::bi) {
            rec.prior_history.push_back(bi.prior());
        }
    }
    rec.guess = agent.guess();
    rec.success = rec.guess == source.k;
    return rec;
}

EstimateWithError simulate_stream_success(Strategy strategy, const TimingConfig &config,
                                          int n, double c_squared, std::optional<int> k,
                                          const EmissionRates &rates, std::int64_t trials,
                                          std::uint64_t seed, int threads) {
    SourceConfig base{n, k.value_or(1), c_squared};
    base.validate();
    config.validate();
    rates.validate();
    const std::uint64_t stream =
        derive_seed(seed, {0x53545245ULL, strategy == Strategy::bl ? 1U : 2U});
    const TrialCounts counts =
        run_trials(trials, stream, threads, [&](std::int64_t, RandomStream &rng) {
            SourceConfig cfg = base;
            if (!k) {
                cfg.k = static_cast<int>(rng.uniform_int(1, n));
            }
            try {
                return run_strategy_on_stream(strategy, config, cfg, rates, rng).success
                           ? TrialVerdict::success
                           : TrialVerdict::failure;
            } catch (const InvalidTrialError &) {
                return TrialVerdict::invalid;
            }
        });
    EstimateWithError e =
        estimate_from_counts(counts.successes, counts.successes + counts.failures);
    e.strategy = std::string(to_string(strategy)) + "_stream";
    e.invalid = counts.invalid;
    e.n = n;
    e.c_squared = c_squared;
    e.k = k;
    e.seed = seed;
    return e;
}

// ---------------------------------------------------------------------------
// Files

void write_events_csv(std::span<const DetectionEvent> events, std::ostream &out) {
    out << "channel,timestamp_ns\n";
    for (const DetectionEvent &e : events) {
        out << channel_code(e.channel) << ',' << e.timestamp << '\n';
    }
}

std::vector<DetectionEvent> read_events_csv(std::istream &in) {
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) {
            return false;
        }
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    };
    if (!next_line()) {
        throw ParseError("empty event file", 0);
    }
    if (line != "channel,timestamp_ns") {
        throw ParseError("expected header 'channel,timestamp_ns'", line_no);
    }
    std::vector<DetectionEvent> events;
    while (next_line()) {
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("expected 'channel,timestamp_ns'", line_no);
        }
        const std::string_view code{line.data(), comma};
        const auto channel = parse_channel(code);
        if (!channel) {
            throw ParseError("unknown channel '" + std::string(code) + "'", line_no);
        }
        const char *first = line.data() + comma + 1;
        const char *last = line.data() + line.size();
        Nanoseconds t = 0;
        const auto [ptr, ec] = std::from_chars(first, last, t);
        if (ec != std::errc{} || ptr != last || first == last) {
            throw ParseError("malformed timestamp", line_no);
        }
        if (t < 0) {
            throw ParseError("negative timestamp", line_no);
        }
        if (!events.empty() && t < events.back().timestamp) {
            throw ParseError("timestamps not sorted", line_no);
        }
        events.push_back({*channel, t});
    }
    return events;
}

void write_bin_outcomes_csv(std::span<const BinOutcome> bins, std::ostream &out) {
    out << "trigger,bin,outcome,timestamp_ns\n";
    for (const BinOutcome &b : bins) {
        out << b.trigger_index << ',' << b.bin_index << ',';
        switch (b.outcome) {
        case BinResult::zero: out << '0'; break;
        case BinResult::one: out << '1'; break;
        case BinResult::empty: out << "empty"; break;
        }
        out << ',';
        if (b.selected_timestamp) {
            out << *b.selected_timestamp;
        }
        out << '\n';
    }
}

} // namespace qcpd
