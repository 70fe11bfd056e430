#include "qcpd/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

#include "qcpd/errors.hpp"
#include "qcpd/kernels.hpp"

namespace qcpd {

std::string_view to_string(Strategy s) noexcept {
    return s == Strategy::bl ? "BL" : "BI";
}

Strategy parse_strategy(std::string_view text) {
    if (text == "bl" || text == "BL") {
        return Strategy::bl;
    }
    if (text == "bi" || text == "BI") {
        return Strategy::bi;
    }
    throw DomainError("unknown strategy '" + std::string(text) +
                      "' (expected bl or bi)");
}

void SourceConfig::validate() const {
    if (n < 1) {
        throw DomainError("sequence length n must be >= 1");
    }
    if (k < 1 || k > n) {
        throw DomainError("change point k must lie in [1, " +
                          std::to_string(n) + "], got " + std::to_string(k));
    }
    if (!(c_squared >= 0.0 && c_squared <= 1.0)) {
        throw DomainError("overlap c^2 must lie in [0, 1]");
    }
}

QubitState SourceConfig::photon_state(int s) const {
    return s < k ? QubitState::horizontal() : make_mutated_state(c_squared);
}

PriorVector PriorVector::uniform(int n) {
    if (n < 1) {
        throw DomainError("prior needs at least one hypothesis");
    }
    return {std::vector<double>(static_cast<std::size_t>(n),
                                1.0 / static_cast<double>(n)),
            1};
}

HypothesisWeights bi_hypothesis_weights(const PriorVector &prior) {
    const int n = prior.n();
    const int s = prior.step;
    if (s < 1 || s > n) {
        throw DomainError("hypothesis weights need 1 <= step <= n");
    }
    const std::span<const double> eta{prior.eta};
    const auto split = static_cast<std::size_t>(s);
    return {kernels::max_or_zero(eta.subspan(split)),
            kernels::max_or_zero(eta.first(split))};
}

double bi_likelihood(int k, int s, Outcome outcome,
                     const BinaryMeasurement &meas, double c_squared) {
    const QubitState psi =
        k > s ? QubitState::horizontal() : make_mutated_state(c_squared);
    return outcome_probabilities(psi, meas).of(outcome);
}

void bi_update_in_place(PriorVector &prior, Outcome outcome,
                        const BinaryMeasurement &meas, double c_squared) {
    const int s = prior.step;
    if (s < 1 || s > prior.n()) {
        throw DomainError("Bayes update past the last photon");
    }
    const double like_h =
        outcome_probabilities(QubitState::horizontal(), meas).of(outcome);
    const double like_phi =
        outcome_probabilities(make_mutated_state(c_squared), meas).of(outcome);
    if (like_h == like_phi && like_h > 0.0) {
        // Constant likelihood: the posterior equals the prior.
        ++prior.step;
        return;
    }
    // Evaluate the evidence before touching the prior so a rejected outcome
    // leaves it intact.
    const std::span<const double> eta{prior.eta};
    const auto split = static_cast<std::size_t>(s);
    const bool phi_live = like_phi > 0.0 && kernels::max_or_zero(eta.first(split)) > 0.0;
    const bool h_live = like_h > 0.0 && kernels::max_or_zero(eta.subspan(split)) > 0.0;
    if (!phi_live && !h_live) {
        throw ImpossibleOutcomeError(
            "outcome " + std::to_string(to_int(outcome)) + " at step " +
            std::to_string(s) + " has zero probability under the prior");
    }
    // Hypotheses k <= s (indices < s) have photon s mutated.
    const double evidence =
        kernels::scale_split(prior.eta, split, like_phi, like_h);
    if (!(evidence > 0.0)) {
        // Underflow of every surviving product; the prior is unusable.
        throw ImpossibleOutcomeError("Bayes evidence underflowed at step " +
                                     std::to_string(s));
    }
    kernels::divide(prior.eta, evidence);
    ++prior.step;
}

PriorVector bi_update(const PriorVector &prior, Outcome outcome,
                      const BinaryMeasurement &meas, double c_squared) {
    PriorVector next = prior;
    bi_update_in_place(next, outcome, meas, c_squared);
    return next;
}

int guess_from_prior(const PriorVector &prior) {
    if (prior.eta.empty()) {
        throw DomainError("empty prior");
    }
    return static_cast<int>(kernels::argmax(prior.eta)) + 1;
}

BayesianAgent::BayesianAgent(int n, double c_squared)
    : prior_(PriorVector::uniform(n)), c_squared_(c_squared) {
    if (!(c_squared >= 0.0 && c_squared <= 1.0)) {
        throw DomainError("overlap c^2 must lie in [0, 1]");
    }
    refresh_measurement();
}

void BayesianAgent::refresh_measurement() {
    if (prior_.step <= prior_.n()) {
        const HypothesisWeights w = bi_hypothesis_weights(prior_);
        current_ = helstrom_measurement(w.p_h, w.p_phi, c_squared_);
    }
}

BinaryMeasurement BayesianAgent::next_measurement() const {
    if (prior_.step > prior_.n()) {
        throw DomainError("no photons left to measure");
    }
    return current_;
}

bool BayesianAgent::observe(Outcome outcome, bool tolerate_impossible) {
    bool used = true;
    try {
        bi_update_in_place(prior_, outcome, next_measurement(), c_squared_);
    } catch (const ImpossibleOutcomeError &) {
        if (!tolerate_impossible) {
            throw;
        }
        ++prior_.step;
        used = false;
    }
    refresh_measurement();
    return used;
}

BasicLocalAgent::BasicLocalAgent(int n) : n_(n) {
    if (n < 1) {
        throw DomainError("sequence length n must be >= 1");
    }
}

bool BasicLocalAgent::observe(Outcome outcome, bool /*tolerate_impossible*/) {
    if (step_ > n_) {
        throw DomainError("observation past the last photon");
    }
    if (outcome == Outcome::one && first_click_ == 0) {
        first_click_ = step_;
    }
    ++step_;
    return true;
}

OutcomeProbabilities apply_outcome_noise(OutcomeProbabilities p,
                                         double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw DomainError("noise epsilon must lie in [0, 1]");
    }
    return {(1.0 - epsilon) * p.p0 + epsilon * p.p1,
            (1.0 - epsilon) * p.p1 + epsilon * p.p0};
}

Outcome sample_outcome(const OutcomeProbabilities &p, RandomStream &rng) {
    return rng.uniform() < p.p1 ? Outcome::one : Outcome::zero;
}

namespace {

template <class Agent>
TrialRecord run_recorded(Agent &agent, const SourceConfig &config,
                         RandomStream &rng, double epsilon) {
    config.validate();
    TrialRecord rec;
    rec.config = config;
    rec.strategy = agent.strategy();
    rec.seed = rng.seed();
    rec.outcomes.reserve(static_cast<std::size_t>(config.n));
    rec.bases.reserve(static_cast<std::size_t>(config.n));
    const QubitState phi = make_mutated_state(config.c_squared);
    if constexpr (std::is_same_v<Agent, BayesianAgent>) {
        rec.prior_history.reserve(static_cast<std::size_t>(config.n) + 1);
        rec.prior_history.push_back(agent.prior());
    }
    for (int s = 1; s <= config.n; ++s) {
        const BinaryMeasurement meas = agent.next_measurement();
        const QubitState &truth = s < config.k ? QubitState::horizontal() : phi;
        const auto probs =
            apply_outcome_noise(outcome_probabilities(truth, meas), epsilon);
        const Outcome r = sample_outcome(probs, rng);
        if (!agent.observe(r, true)) {
            ++rec.discarded_outcomes;
        }
        rec.outcomes.push_back(r);
        rec.bases.push_back(meas);
        if constexpr (std::is_same_v<Agent, BayesianAgent>) {
            rec.prior_history.push_back(agent.prior());
        }
    }
    rec.guess = agent.guess();
    rec.success = rec.guess == config.k;
    return rec;
}

} // namespace

TrialRecord bi_run(const SourceConfig &config, RandomStream &rng,
                   double epsilon) {
    config.validate();
    BayesianAgent agent(config.n, config.c_squared);
    return run_recorded(agent, config, rng, epsilon);
}

TrialRecord bl_run(const SourceConfig &config, RandomStream &rng,
                   double epsilon) {
    config.validate();
    BasicLocalAgent agent(config.n);
    return run_recorded(agent, config, rng, epsilon);
}

TrialRecord run_strategy(Strategy strategy, const SourceConfig &config,
                         RandomStream &rng, double epsilon) {
    return strategy == Strategy::bi ? bi_run(config, rng, epsilon)
                                    : bl_run(config, rng, epsilon);
}

namespace {

template <class Agent>
int guess_only(Agent &agent, const SourceConfig &config, RandomStream &rng,
               double epsilon) {
    const QubitState phi = make_mutated_state(config.c_squared);
    for (int s = 1; s <= config.n; ++s) {
        const QubitState &truth = s < config.k ? QubitState::horizontal() : phi;
        const auto probs = apply_outcome_noise(
            outcome_probabilities(truth, agent.next_measurement()), epsilon);
        agent.observe(sample_outcome(probs, rng), true);
    }
    return agent.guess();
}

} // namespace

int sample_guess(Strategy strategy, const SourceConfig &config,
                 RandomStream &rng, double epsilon) {
    config.validate();
    if (strategy == Strategy::bi) {
        BayesianAgent agent(config.n, config.c_squared);
        return guess_only(agent, config, rng, epsilon);
    }
    BasicLocalAgent agent(config.n);
    return guess_only(agent, config, rng, epsilon);
}

TrialRecord replay(Strategy strategy, const SourceConfig &config,
                   std::span<const Outcome> outcomes) {
    config.validate();
    if (outcomes.size() != static_cast<std::size_t>(config.n)) {
        throw DomainError("replay needs exactly n outcomes");
    }
    TrialRecord rec;
    rec.config = config;
    rec.strategy = strategy;
    BayesianAgent bi(config.n, config.c_squared);
    BasicLocalAgent bl(config.n);
    DetectionAgent &agent = strategy == Strategy::bi
                                ? static_cast<DetectionAgent &>(bi)
                                : static_cast<DetectionAgent &>(bl);
    if (strategy == Strategy::bi) {
        rec.prior_history.push_back(bi.prior());
    }
    for (const Outcome r : outcomes) {
        rec.bases.push_back(agent.next_measurement());
        agent.observe(r, false);
        rec.outcomes.push_back(r);
        if (strategy == Strategy::bi) {
            rec.prior_history.push_back(bi.prior());
        }
    }
    rec.guess = agent.guess();
    rec.success = rec.guess == config.k;
    return rec;
}

double bl_success_closed_form(int n, double c_squared) {
    if (n < 1) {
        throw DomainError("sequence length n must be >= 1");
    }
    return 1.0 - c_squared + c_squared / static_cast<double>(n);
}

} // namespace qcpd
