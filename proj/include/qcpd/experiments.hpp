#pragma once

/**
 * @file
 * Monte Carlo estimation of success probabilities, exhaustive oracles for
 * small n, and the parameter sweeps behind the change-point figures.
 *
 * Every trial draws from its own RandomStream seeded by
 * derive_seed(stream_seed, trial_index); results are aggregated as counts,
 * so the outcome of a run does not depend on how many threads executed it.
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcpd/strategies.hpp"

namespace qcpd {

struct EstimateWithError {
    std::string strategy;
    double mean{0.0};
    /// Binomial standard error sqrt(mean (1 - mean) / trials); 0 for exact
    /// values.
    double std_error{0.0};
    /// Valid trials behind the mean; 0 for exact values.
    std::int64_t trials{0};
    /// Trials discarded as invalid (stream-driven runs with empty bins).
    std::int64_t invalid{0};
    int n{0};
    double c_squared{0.0};
    /// Change point, or nullopt when averaged uniformly over k.
    std::optional<int> k;
    double epsilon{0.0};
    std::uint64_t seed{0};

    [[nodiscard]] bool exact() const noexcept { return trials == 0; }
};

/// Builds a Monte Carlo estimate from success counts.
[[nodiscard]] EstimateWithError estimate_from_counts(std::int64_t successes,
                                                     std::int64_t trials);

/// Standard deviation of the mean over `resamples` binomial resamples of
/// the same trial count, mirroring error bars taken from repeated
/// simulations.
[[nodiscard]] double bootstrap_std_error(double mean, std::int64_t trials,
                                         int resamples, std::uint64_t seed);

enum class TrialVerdict : unsigned char { failure, success, invalid };

struct TrialCounts {
    std::int64_t successes{0};
    std::int64_t failures{0};
    std::int64_t invalid{0};
};

/// Runs trial(index, stream) for index in [0, trials) with
/// stream = RandomStream(derive_seed(stream_seed, index)) over up to
/// `threads` worker threads.
[[nodiscard]] TrialCounts
run_trials(std::int64_t trials, std::uint64_t stream_seed, int threads,
           const std::function<TrialVerdict(std::int64_t, RandomStream &)> &trial);

struct SimulationOptions {
    double epsilon{0.0};
    int threads{1};
};

/// Success fraction of `trials` independent runs. With `k` unset each trial
/// draws its change point uniformly from [1, n].
[[nodiscard]] EstimateWithError simulate_success(Strategy strategy, int n,
                                                 double c_squared,
                                                 std::optional<int> k,
                                                 std::int64_t trials,
                                                 std::uint64_t seed,
                                                 const SimulationOptions &opts = {});

/// Largest n accepted by the exhaustive oracles.
inline constexpr int kMaxExactN = 16;

/// Exact BI success for every true change point, by depth-first enumeration
/// of all 2^n outcome strings with the deterministic adaptive measurements.
/// Element k-1 holds P(guess = k | true k). Throws ResourceError for
/// n > kMaxExactN.
[[nodiscard]] std::vector<double> exact_bi_success_all(int n, double c_squared);

[[nodiscard]] double exact_bi_success(int n, double c_squared, int k);

/// 1 - c2 for k < n, 1 for k = n.
[[nodiscard]] double exact_bl_success(int n, double c_squared, int k);

/// Mean over k of the per-k values.
[[nodiscard]] double k_average(const std::vector<double> &per_k);

struct SweepRow {
    double axis_value{0.0};
    std::vector<EstimateWithError> entries;

    [[nodiscard]] const EstimateWithError &at(const std::string &strategy) const;
};

struct SweepTable {
    /// "k", "c_squared" or "n".
    std::string axis;
    std::vector<std::string> strategies;
    std::vector<SweepRow> rows;
    std::uint64_t master_seed{0};
};

struct SweepOptions {
    std::int64_t trials{20000};
    double epsilon{0.0};
    std::uint64_t master_seed{0};
    int threads{1};
};

/// Default overlap grid: 0.01, 0.05, 0.10, ..., 0.95, 0.99.
[[nodiscard]] std::vector<double> default_overlap_grid();

/// Per-k Monte Carlo success for each strategy, the SRM success conditioned
/// on k ("SRM") and the k-averaged SRM value as a constant reference column
/// ("SRM_avg"). `trials` is per k.
[[nodiscard]] SweepTable sweep_k(const std::vector<Strategy> &strategies, int n,
                                 double c_squared, const SweepOptions &opts);

/// k-averaged success per overlap: Monte Carlo for each strategy, the BL
/// closed form ("BL_theory") when BL is requested, and the exact SRM value.
[[nodiscard]] SweepTable sweep_overlap(const std::vector<Strategy> &strategies,
                                       int n, const std::vector<double> &grid,
                                       const SweepOptions &opts);

/// k-averaged BI and BL success per n, plus their difference ("BI-BL").
[[nodiscard]] SweepTable sweep_n(const std::vector<int> &n_values,
                                 double c_squared, const SweepOptions &opts);

/// Per overlap: BI improvement over BL ("BI-BL") and remaining distance to
/// the optimum ("SRM-BI").
[[nodiscard]] SweepTable distance_table(int n, const std::vector<double> &grid,
                                        const SweepOptions &opts);

} // namespace qcpd
