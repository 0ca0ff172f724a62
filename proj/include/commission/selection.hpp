#pragma once

// Final-controller choice: hard constraints on the front, then the smallest
// weighted distance to the ideal point in candidate-normalized space.

#include "commission/error.hpp"
#include "commission/pareto.hpp"
#include "commission/trial.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace commission {

struct SelectionConstraints {
    std::optional<double> max_overshoot;
    std::optional<double> max_oscillation;

    void validate() const
    {
        if ((max_overshoot && !(*max_overshoot >= 0.0)) || (max_oscillation && !(*max_oscillation >= 0.0))) {
            throw ConfigError("selection constraints must be >= 0");
        }
    }
};

struct SelectionWeights {
    double iae = 1.0;
    double itae = 1.0;
    double os = 1.0;
    double osc = 1.0;

    std::array<double, kObjectiveCount> as_array() const { return {iae, itae, os, osc}; }

    void validate() const
    {
        const auto w = as_array();
        double sum = 0.0;
        for (const double v : w) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw ConfigError("selection weights must be finite and >= 0");
            }
            sum += v;
        }
        if (!(sum > 0.0)) {
            throw ConfigError("selection weights must not all be zero");
        }
    }
};

inline SelectionWeights strategy_weights(std::string_view name)
{
    if (name == "balanced") {
        return {1.0, 1.0, 1.0, 1.0};
    }
    if (name == "fast") {
        return {2.0, 2.0, 1.0, 1.0};
    }
    if (name == "smooth") {
        return {1.0, 1.0, 2.0, 2.0};
    }
    throw ConfigError("unknown selection strategy '" + std::string(name) + "' (valid: balanced, fast, smooth)");
}

// Members satisfying every active bound; the whole front when none do.
inline std::vector<TrialRecord> filter_candidates(std::span<const TrialRecord> front, const SelectionConstraints& c,
                                                  bool* used_fallback = nullptr)
{
    if (front.empty()) {
        throw std::invalid_argument("filter_candidates: empty front");
    }
    c.validate();
    std::vector<TrialRecord> out;
    for (const auto& r : front) {
        if (c.max_overshoot && r.objectives.os > *c.max_overshoot) {
            continue;
        }
        if (c.max_oscillation && r.objectives.osc > *c.max_oscillation) {
            continue;
        }
        out.push_back(r);
    }
    const bool fallback = out.empty();
    if (used_fallback != nullptr) {
        *used_fallback = fallback;
    }
    if (fallback) {
        out.assign(front.begin(), front.end());
    }
    return out;
}

// Weighted distance of every candidate from the ideal point.
inline std::vector<double> selection_distances(std::span<const TrialRecord> candidates, const SelectionWeights& weights)
{
    std::array<double, kObjectiveCount> lo;
    std::array<double, kObjectiveCount> hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& c : candidates) {
        const auto v = c.objectives.as_array();
        for (std::size_t m = 0; m < kObjectiveCount; ++m) {
            lo[m] = std::min(lo[m], v[m]);
            hi[m] = std::max(hi[m], v[m]);
        }
    }
    const auto w = weights.as_array();
    std::vector<double> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) {
        const auto v = c.objectives.as_array();
        double sum = 0.0;
        for (std::size_t m = 0; m < kObjectiveCount; ++m) {
            const double range = hi[m] - lo[m];
            const double t = (v[m] - lo[m]) / (range > 0.0 ? range : 1.0);
            sum += w[m] * t * t;
        }
        out.push_back(std::sqrt(sum));
    }
    return out;
}

// Ties go to the lowest trial index.
inline const TrialRecord& select_final(std::span<const TrialRecord> candidates, const SelectionWeights& weights)
{
    if (candidates.empty()) {
        throw std::invalid_argument("select_final: no candidates");
    }
    weights.validate();
    const auto dist = selection_distances(candidates, weights);
    std::size_t best = 0;
    for (std::size_t j = 1; j < candidates.size(); ++j) {
        if (dist[j] < dist[best] || (dist[j] == dist[best] && candidates[j].trial_index < candidates[best].trial_index)) {
            best = j;
        }
    }
    return candidates[best];
}

inline TrialRecord select_controller(const ParetoFront& front, const SelectionWeights& weights,
                                     const SelectionConstraints& constraints = {}, bool* used_fallback = nullptr)
{
    const auto candidates = filter_candidates(front.members(), constraints, used_fallback);
    return select_final(candidates, weights);
}

} // namespace commission
