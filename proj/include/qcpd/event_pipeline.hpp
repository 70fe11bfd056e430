#pragma once

/**
 * @file
 * Time-tagged detector events of a heralded single-photon source and the
 * logic that turns them into one measurement outcome per time bin.
 *
 * A signal click counts as an *effective event* when some idler click lies
 * within the coincidence window of exactly one polarization channel. After
 * each trigger, bin s covers trigger-relative offsets
 * ((s-1) * chopper_period, (s-1) * chopper_period + bin_width] (open left,
 * closed right, integer nanoseconds); the earliest effective signal click in
 * that interval fixes the outcome of photon s: "0" for H, "1" for V.
 */

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qcpd/experiments.hpp"
#include "qcpd/quantum_core.hpp"
#include "qcpd/rng.hpp"
#include "qcpd/strategies.hpp"

namespace qcpd {

using Nanoseconds = std::int64_t;

inline constexpr Nanoseconds kNanosPerMilli = 1'000'000;

enum class Channel : unsigned char { trigger, idler, signal_h, signal_v };

/// File codes: TRIG, IDLER, H, V.
[[nodiscard]] std::string_view channel_code(Channel c) noexcept;
[[nodiscard]] std::optional<Channel> parse_channel(std::string_view code) noexcept;

struct DetectionEvent {
    Channel channel{Channel::trigger};
    Nanoseconds timestamp{0};

    friend bool operator==(const DetectionEvent &, const DetectionEvent &) = default;
};

/// Stream order: by timestamp, then by channel.
[[nodiscard]] inline bool event_before(const DetectionEvent &a,
                                       const DetectionEvent &b) noexcept {
    return a.timestamp != b.timestamp ? a.timestamp < b.timestamp
                                      : a.channel < b.channel;
}

struct TimingConfig {
    Nanoseconds trigger_interval{100 * kNanosPerMilli};
    Nanoseconds chopper_period{5 * kNanosPerMilli};
    Nanoseconds bin_width{2'500'000};
    Nanoseconds coincidence_window{3};
    int n_bins{20};

    /// Throws DomainError unless all durations are positive,
    /// bin_width <= chopper_period and n_bins * chopper_period <=
    /// trigger_interval.
    void validate() const;
    /// Offset of the start of bin s (1-based) from its trigger.
    [[nodiscard]] Nanoseconds bin_start(int s) const noexcept {
        return static_cast<Nanoseconds>(s - 1) * chopper_period;
    }
};

enum class Effective : unsigned char { outcome_zero, outcome_one, not_effective };

enum class BinResult : unsigned char { zero, one, empty };

struct BinOutcome {
    int trigger_index{0};
    int bin_index{1};
    BinResult outcome{BinResult::empty};
    std::optional<Nanoseconds> selected_timestamp;

    friend bool operator==(const BinOutcome &, const BinOutcome &) = default;
};

/// |t1 - t2| < window
[[nodiscard]] constexpr bool coincident(Nanoseconds t1, Nanoseconds t2,
                                        Nanoseconds window) noexcept {
    const Nanoseconds d = t1 > t2 ? t1 - t2 : t2 - t1;
    return d < window;
}

/// Classifies the idler click at `idler_t` against sorted H and V
/// timestamps.
[[nodiscard]] Effective classify_effective(Nanoseconds idler_t,
                                           std::span<const Nanoseconds> h_events,
                                           std::span<const Nanoseconds> v_events,
                                           Nanoseconds window);

/// Per-channel timestamp lists of a sorted stream.
struct ChannelIndex {
    std::vector<Nanoseconds> trigger;
    std::vector<Nanoseconds> idler;
    std::vector<Nanoseconds> h;
    std::vector<Nanoseconds> v;

    /// Throws ParseError if the stream is not sorted by timestamp.
    [[nodiscard]] static ChannelIndex build(std::span<const DetectionEvent> stream);
};

/// Outcome of bin s (1-based) of the frame started by the trigger at
/// `trigger_t`.
[[nodiscard]] BinOutcome select_bin(const ChannelIndex &index,
                                    Nanoseconds trigger_t, int s,
                                    const TimingConfig &config);

/// n_bins outcomes per trigger, triggers in stream order. Throws
/// DomainError when the stream has no trigger and ParseError when it is
/// unsorted.
[[nodiscard]] std::vector<BinOutcome>
postselect_bins(std::span<const DetectionEvent> stream,
                const TimingConfig &config);

enum class PairStatistics : unsigned char {
    /// floor(pairs_per_bin) pairs, plus one more with probability equal to
    /// the fractional part.
    fixed,
    /// Poisson with mean pairs_per_bin.
    poisson
};

struct EmissionRates {
    double pairs_per_bin{1.0};
    /// Uncorrelated singles on each of IDLER, H and V, per millisecond.
    double background_per_ms{0.0};
    PairStatistics statistics{PairStatistics::fixed};

    void validate() const;
};

/// Measurement basis for bin s (1-based) of frame `frame`.
using BasisProvider = std::function<BinaryMeasurement(int frame, int s)>;

struct GeneratedStream {
    std::vector<DetectionEvent> events;
    /// Outcome of the earliest heralded pair of each bin, frame-major;
    /// empty where the bin got no pair.
    std::vector<BinResult> planted;
};

/// Synthesizes `frames` trigger frames, frame f starting with a trigger at
/// f * trigger_interval. Each bin receives idler+signal pairs whose signal
/// channel is drawn by the Born rule for the bin's basis applied to the
/// true photon state; background singles are spread uniformly over each
/// frame.
[[nodiscard]] GeneratedStream generate_stream(const TimingConfig &config,
                                              const SourceConfig &source,
                                              const BasisProvider &basis,
                                              const EmissionRates &rates,
                                              RandomStream &rng, int frames = 1);

/// One trial driven through the event layer: for every bin the agent picks
/// the basis, the bin's pairs are generated, the bin is postselected and
/// its outcome fed back. Throws InvalidTrialError on an empty bin.
[[nodiscard]] TrialRecord run_strategy_on_stream(Strategy strategy,
                                                 const TimingConfig &config,
                                                 const SourceConfig &source,
                                                 const EmissionRates &rates,
                                                 RandomStream &rng);

/// Monte Carlo over run_strategy_on_stream. Invalid trials are excluded
/// from the mean and reported in `invalid`.
[[nodiscard]] EstimateWithError
simulate_stream_success(Strategy strategy, const TimingConfig &config, int n,
                        double c_squared, std::optional<int> k,
                        const EmissionRates &rates, std::int64_t trials,
                        std::uint64_t seed, int threads = 1);

/// CSV with header "channel,timestamp_ns".
void write_events_csv(std::span<const DetectionEvent> events, std::ostream &out);
/// Rejects unknown channels, malformed or negative timestamps and
/// decreasing timestamps with a ParseError naming the line.
[[nodiscard]] std::vector<DetectionEvent> read_events_csv(std::istream &in);

/// CSV with header "trigger,bin,outcome,timestamp_ns"; outcome is 0, 1 or
/// "empty" (timestamp left blank).
void write_bin_outcomes_csv(std::span<const BinOutcome> bins, std::ostream &out);

} // namespace qcpd
