#include <cmath>
#include <stdexcept>

#include "kcd/stats.hpp"

namespace kcd::stats {

std::string_view to_string(SprtDecision d) noexcept {
    switch (d) {
        case SprtDecision::accept_h1: return "accept_h1";
        case SprtDecision::accept_h0: return "accept_h0";
        case SprtDecision::undecided: break;
    }
    return "undecided";
}

SprtBoundaries sprt_boundaries(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("SPRT error rates must be in (0, 1)");
    return {std::log((1.0 - beta) / alpha), std::log(beta / (1.0 - alpha))};
}

Sprt::Sprt(const SprtParams& params) : params_(params), bounds_(sprt_boundaries(params.alpha, params.beta)) {
    if (!(params.p0 > 0.0 && params.p0 < params.p1 && params.p1 < 1.0))
        throw std::invalid_argument("SPRT requires 0 < p0 < p1 < 1");
    hit_step_ = std::log(params.p1 / params.p0);
    miss_step_ = std::log1p(-params.p1) - std::log1p(-params.p0);
}

SprtDecision Sprt::update(std::uint64_t trials, std::uint64_t hits) {
    if (outcome_.decision != SprtDecision::undecided) return outcome_.decision;
    if (hits > trials) throw std::invalid_argument("SPRT batch has more hits than trials");
    trials_ += trials;
    llr_ += static_cast<double>(hits) * hit_step_ + static_cast<double>(trials - hits) * miss_step_;
    outcome_.llr_trace.push_back(llr_);
    if (llr_ >= bounds_.upper) {
        outcome_.decision = SprtDecision::accept_h1;
        outcome_.trials_at_decision = trials_;
    } else if (llr_ <= bounds_.lower) {
        outcome_.decision = SprtDecision::accept_h0;
        outcome_.trials_at_decision = trials_;
    }
    return outcome_.decision;
}

SprtOutcome sprt(std::span<const SprtObservation> stream, const SprtParams& params) {
    Sprt test(params);
    for (const auto& obs : stream)
        if (test.update(obs.trials, obs.hits) != SprtDecision::undecided) break;
    SprtOutcome out = test.outcome();
    if (out.decision == SprtDecision::undecided) out.trials_at_decision = test.trials();
    return out;
}

}  // namespace kcd::stats
