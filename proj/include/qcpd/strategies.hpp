#pragma once

/**
 * @file
 * Change-point detection strategies on a sequence of n photons emitted as
 * |H>^(k-1) |phi>^(n-k+1):
 *
 *  - basic local (BL): fixed {|H>, |V>} measurement, guess the position of
 *    the first "1" outcome (or n if none occurs);
 *  - Bayesian inference (BI): a Helstrom measurement per photon chosen from
 *    the current prior over k, followed by a Bayes update;
 *  - optimal global: success probability of the square-root measurement
 *    on the n hypothesis states.
 *
 * Positions k and steps s are 1-based throughout, as in the physics.
 */

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qcpd/quantum_core.hpp"
#include "qcpd/rng.hpp"

namespace qcpd {

enum class Strategy : unsigned char { bl, bi };

[[nodiscard]] std::string_view to_string(Strategy s) noexcept;
/// Accepts "bl"/"BL"/"bi"/"BI"; throws DomainError otherwise.
[[nodiscard]] Strategy parse_strategy(std::string_view text);

struct SourceConfig {
    int n{1};
    int k{1};
    double c_squared{0.0};

    /// Throws DomainError unless n >= 1, 1 <= k <= n and c2 in [0, 1].
    void validate() const;
    /// State of photon s (1-based): |H> before the change point, |phi> from
    /// k on.
    [[nodiscard]] QubitState photon_state(int s) const;
};

struct PriorVector {
    std::vector<double> eta;
    /// 1-based index of the next measurement; n + 1 once all are done.
    int step{1};

    [[nodiscard]] static PriorVector uniform(int n);
    [[nodiscard]] int n() const noexcept { return static_cast<int>(eta.size()); }
    [[nodiscard]] double operator[](int k) const { return eta.at(static_cast<std::size_t>(k - 1)); }

    friend bool operator==(const PriorVector &, const PriorVector &) = default;
};

struct HypothesisWeights {
    double p_h;
    double p_phi;
};

/// p_h: largest prior among hypotheses k in [step+1, n] (photon `step` still
/// |H>), 0 when that range is empty. p_phi: largest among k in [1, step].
[[nodiscard]] HypothesisWeights bi_hypothesis_weights(const PriorVector &prior);

/// p(outcome | k) for photon s under the given measurement.
[[nodiscard]] double bi_likelihood(int k, int s, Outcome outcome,
                                   const BinaryMeasurement &meas,
                                   double c_squared);

/// One Bayes step at prior.step. Throws ImpossibleOutcomeError when the
/// prior assigns the outcome probability zero.
[[nodiscard]] PriorVector bi_update(const PriorVector &prior, Outcome outcome,
                                    const BinaryMeasurement &meas,
                                    double c_squared);

/// In-place form of bi_update; on error the prior is left untouched.
void bi_update_in_place(PriorVector &prior, Outcome outcome,
                        const BinaryMeasurement &meas, double c_squared);

/// Smallest k attaining the maximum prior.
[[nodiscard]] int guess_from_prior(const PriorVector &prior);

struct TrialRecord {
    SourceConfig config;
    Strategy strategy{Strategy::bi};
    std::vector<Outcome> outcomes;
    std::vector<BinaryMeasurement> bases;
    /// n + 1 snapshots for BI (index 0 is the uniform start), empty for BL.
    std::vector<PriorVector> prior_history;
    int guess{0};
    bool success{false};
    std::uint64_t seed{0};
    /// Outcomes the agent discarded because its model gave them probability
    /// zero (only possible with outcome noise).
    int discarded_outcomes{0};
};

/// Sequential decision maker: proposes the measurement for the next photon,
/// then consumes its outcome.
class DetectionAgent {
  public:
    virtual ~DetectionAgent() = default;
    [[nodiscard]] virtual BinaryMeasurement next_measurement() const = 0;
    /// Returns false if the outcome was discarded as impossible under the
    /// agent's model (only when `tolerate_impossible` is set; otherwise
    /// ImpossibleOutcomeError propagates).
    virtual bool observe(Outcome outcome, bool tolerate_impossible) = 0;
    [[nodiscard]] virtual int guess() const = 0;
    [[nodiscard]] virtual int step() const = 0;
    [[nodiscard]] virtual Strategy strategy() const = 0;
};

class BayesianAgent final : public DetectionAgent {
  public:
    BayesianAgent(int n, double c_squared);

    [[nodiscard]] BinaryMeasurement next_measurement() const override;
    bool observe(Outcome outcome, bool tolerate_impossible) override;
    [[nodiscard]] int guess() const override { return guess_from_prior(prior_); }
    [[nodiscard]] int step() const override { return prior_.step; }
    [[nodiscard]] Strategy strategy() const override { return Strategy::bi; }

    [[nodiscard]] const PriorVector &prior() const noexcept { return prior_; }

  private:
    void refresh_measurement();

    PriorVector prior_;
    double c_squared_;
    BinaryMeasurement current_{};
};

class BasicLocalAgent final : public DetectionAgent {
  public:
    explicit BasicLocalAgent(int n);

    [[nodiscard]] BinaryMeasurement next_measurement() const override {
        return BinaryMeasurement::computational();
    }
    bool observe(Outcome outcome, bool tolerate_impossible) override;
    /// First "1" position, or n when no "1" has been seen.
    [[nodiscard]] int guess() const override {
        return first_click_ > 0 ? first_click_ : n_;
    }
    [[nodiscard]] int step() const override { return step_; }
    [[nodiscard]] Strategy strategy() const override { return Strategy::bl; }

  private:
    int n_;
    int step_{1};
    int first_click_{0};
};

/// Symmetric readout flip with probability epsilon.
[[nodiscard]] OutcomeProbabilities apply_outcome_noise(OutcomeProbabilities p,
                                                       double epsilon);

/// Draws one outcome: "1" with probability p.p1.
[[nodiscard]] Outcome sample_outcome(const OutcomeProbabilities &p,
                                     RandomStream &rng);

/// Full BI trial with outcomes sampled from the true photon states. Readout
/// noise epsilon flips sampled outcomes; the agent keeps its ideal model
/// and discards any outcome that model deems impossible.
[[nodiscard]] TrialRecord bi_run(const SourceConfig &config, RandomStream &rng,
                                 double epsilon = 0.0);

/// Full BL trial, same sampling model as bi_run.
[[nodiscard]] TrialRecord bl_run(const SourceConfig &config, RandomStream &rng,
                                 double epsilon = 0.0);

[[nodiscard]] TrialRecord run_strategy(Strategy strategy,
                                       const SourceConfig &config,
                                       RandomStream &rng, double epsilon = 0.0);

/// Guess of one sampled trial without recording anything; same random draws
/// as run_strategy, so the guess matches its record for equal seeds.
[[nodiscard]] int sample_guess(Strategy strategy, const SourceConfig &config,
                               RandomStream &rng, double epsilon = 0.0);

/// Re-runs an agent on a recorded outcome string. Strict: an impossible
/// outcome raises ImpossibleOutcomeError.
[[nodiscard]] TrialRecord replay(Strategy strategy, const SourceConfig &config,
                                 std::span<const Outcome> outcomes);

/// 1 - c2 + c2 / n
[[nodiscard]] double bl_success_closed_form(int n, double c_squared);

/// [(sqrt G)_kk]^2 for k = 1..n with G_kl = c^|k-l|: success of the
/// square-root measurement conditioned on each change point.
[[nodiscard]] std::vector<double> srm_conditional_success(int n, double c_squared);

/// (1/n) sum_k [(sqrt G)_kk]^2, the optimal global success probability.
[[nodiscard]] double srm_optimal_probability(int n, double c_squared);

/// Gram matrix of the hypothesis states, row-major n x n.
[[nodiscard]] std::vector<double> change_point_gram(int n, double c_squared);

} // namespace qcpd
