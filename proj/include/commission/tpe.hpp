#pragma once

// Multivariate multi-objective Tree-structured Parzen Estimator.
//
// History is split into a good and a bad set by non-dominated rank. Each set
// becomes a mixture of joint 2-D kernels (one weight per observation) plus a
// uniform prior; candidates drawn from the good mixture are scored by the
// density ratio l(x) / g(x).

#include "commission/pareto.hpp"
#include "commission/rng.hpp"
#include "commission/search_space.hpp"
#include "commission/trial.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace commission {

struct TpeConfig {
    double gamma_fraction = 0.25;
    std::size_t candidate_count = 24;
    double prior_weight = 1.0;
    double bandwidth_floor = 1.0;
    // Multiplies the range-based kernel bandwidth.
    double bandwidth_scale = 1.0;

    void validate() const
    {
        if (!(gamma_fraction > 0.0 && gamma_fraction < 1.0)) {
            throw std::invalid_argument("tpe: gamma_fraction must lie in (0, 1)");
        }
        if (candidate_count < 1) {
            throw std::invalid_argument("tpe: candidate_count must be >= 1");
        }
        if (!(prior_weight >= 0.0)) {
            throw std::invalid_argument("tpe: prior_weight must be >= 0");
        }
        if (!(bandwidth_floor > 0.0)) {
            throw std::invalid_argument("tpe: bandwidth_floor must be > 0");
        }
        if (!(bandwidth_scale > 0.0)) {
            throw std::invalid_argument("tpe: bandwidth_scale must be > 0");
        }
    }
};

// Reference used when ranking the boundary front by hypervolume
// contribution; coordinates are min-max normalized over the history.
inline constexpr double kSplitReference = 1.1;

struct TpeSplit {
    std::vector<std::size_t> good; // indices into the split input
    std::vector<std::size_t> bad;
};

inline std::size_t tpe_good_count(std::size_t n, double gamma_fraction)
{
    const auto k = static_cast<std::size_t>(std::ceil(gamma_fraction * static_cast<double>(n) - 1e-12));
    return std::clamp<std::size_t>(k, 1, n);
}

// Leave-one-out hypervolume contribution of every point in `front`.
inline std::vector<double> hypervolume_contributions(std::span<const ObjectivePoint> front, const ReferencePoint& ref)
{
    const double total = hypervolume(front, ref);
    std::vector<double> out(front.size());
    std::vector<ObjectivePoint> rest;
    for (std::size_t i = 0; i < front.size(); ++i) {
        rest.assign(front.begin(), front.end());
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        out[i] = total - hypervolume(rest, ref);
    }
    return out;
}

inline TpeSplit tpe_split(std::span<const ObjectivePoint> objectives, double gamma_fraction)
{
    const std::size_t n = objectives.size();
    if (n < 2) {
        throw std::invalid_argument("tpe_split: needs at least two records");
    }
    const std::size_t want = tpe_good_count(n, gamma_fraction);
    const auto ranks = non_dominated_ranks<ObjectivePoint>(objectives);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });

    TpeSplit split;
    std::size_t pos = 0;
    while (pos < n && split.good.size() < want) {
        std::size_t end = pos;
        while (end < n && ranks[order[end]] == ranks[order[pos]]) {
            ++end;
        }
        const std::size_t size = end - pos;
        if (split.good.size() + size <= want) {
            split.good.insert(split.good.end(), order.begin() + static_cast<std::ptrdiff_t>(pos),
                              order.begin() + static_cast<std::ptrdiff_t>(end));
        } else {
            const auto bounds = NormalizationBounds::from_points(objectives);
            std::vector<std::size_t> members(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                             order.begin() + static_cast<std::ptrdiff_t>(end));
            std::vector<ObjectivePoint> pts;
            for (const auto i : members) {
                pts.push_back(bounds.normalize(objectives[i]));
            }
            ReferencePoint ref;
            ref.coords.fill(kSplitReference);
            const auto contrib = hypervolume_contributions(pts, ref);
            std::vector<std::size_t> local(members.size());
            std::iota(local.begin(), local.end(), 0);
            std::stable_sort(local.begin(), local.end(), [&](std::size_t a, std::size_t b) { return contrib[a] > contrib[b]; });
            const std::size_t take = want - split.good.size();
            std::vector<std::size_t> chosen;
            for (std::size_t j = 0; j < take; ++j) {
                chosen.push_back(members[local[j]]);
            }
            std::sort(chosen.begin(), chosen.end());
            split.good.insert(split.good.end(), chosen.begin(), chosen.end());
        }
        pos = end;
    }
    std::vector<bool> in_good(n, false);
    for (const auto i : split.good) {
        in_good[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!in_good[i]) {
            split.bad.push_back(i);
        }
    }
    return split;
}

namespace detail {

// P(a <= Z <= b) for standard normal Z, avoiding cancellation in the tails.
inline double normal_interval(double a, double b)
{
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    if (a >= 0.0) {
        return 0.5 * (std::erfc(a * inv_sqrt2) - std::erfc(b * inv_sqrt2));
    }
    if (b <= 0.0) {
        return 0.5 * (std::erfc(-b * inv_sqrt2) - std::erfc(-a * inv_sqrt2));
    }
    return 1.0 - 0.5 * std::erfc(-a * inv_sqrt2) - 0.5 * std::erfc(b * inv_sqrt2);
}

} // namespace detail

// Mixture over integer points: one product kernel per observation (Gaussian,
// truncated to the box and discretized to integer cells) and a uniform prior.
class ParzenEstimator {
public:
    ParzenEstimator(std::vector<ParameterPoint> observations, const SearchSpace& space, const TpeConfig& config)
        : observations_(std::move(observations)), space_(space), prior_weight_(config.prior_weight)
    {
        const double n = static_cast<double>(std::max<std::size_t>(observations_.size(), 1));
        const double scott = std::pow(n, -1.0 / (static_cast<double>(SearchSpace::kDims) + 4.0));
        for (std::size_t d = 0; d < SearchSpace::kDims; ++d) {
            bandwidth_[d] = std::max(config.bandwidth_floor, config.bandwidth_scale * static_cast<double>(space.ranges[d].width()) * scott);
        }
        total_weight_ = static_cast<double>(observations_.size()) + prior_weight_;
        if (!(total_weight_ > 0.0)) {
            prior_weight_ = 1.0;
            total_weight_ = 1.0;
        }
    }

    double bandwidth(std::size_t dim) const { return bandwidth_[dim]; }
    const std::vector<ParameterPoint>& observations() const noexcept { return observations_; }

    // Probability mass of the kernel centred at `center` on integer `x` along `dim`.
    double kernel_mass(std::size_t dim, double center, std::int64_t x) const
    {
        const auto& r = space_.ranges[dim];
        const double s = bandwidth_[dim];
        const double lo = (static_cast<double>(r.lower) - 0.5 - center) / s;
        const double hi = (static_cast<double>(r.upper) + 0.5 - center) / s;
        const double norm = detail::normal_interval(lo, hi);
        const double cell = detail::normal_interval((static_cast<double>(x) - 0.5 - center) / s,
                                                    (static_cast<double>(x) + 0.5 - center) / s);
        return norm > 0.0 ? cell / norm : 0.0;
    }

    double prior_mass() const
    {
        double m = 1.0;
        for (const auto& r : space_.ranges) {
            m /= static_cast<double>(r.width() + 1);
        }
        return m;
    }

    double pmf(const ParameterPoint& x) const
    {
        double sum = prior_weight_ * prior_mass();
        for (const auto& obs : observations_) {
            double k = 1.0;
            for (std::size_t d = 0; d < SearchSpace::kDims; ++d) {
                k *= kernel_mass(d, static_cast<double>(SearchSpace::coord(obs, d)), SearchSpace::coord(x, d));
            }
            sum += k;
        }
        return sum / total_weight_;
    }

    double log_pmf(const ParameterPoint& x) const
    {
        return std::log(std::max(pmf(x), std::numeric_limits<double>::min()));
    }

    ParameterPoint sample(Rng& rng) const
    {
        const double pick = rng.uniform01() * total_weight_;
        const auto idx = static_cast<std::size_t>(pick);
        if (idx >= observations_.size()) {
            return random_propose(space_, rng);
        }
        const auto& obs = observations_[idx];
        return {sample_dim(0, static_cast<double>(obs.kp), rng), sample_dim(1, static_cast<double>(obs.ki), rng)};
    }

private:
    std::int64_t sample_dim(std::size_t dim, double center, Rng& rng) const
    {
        const auto& r = space_.ranges[dim];
        const double lo = static_cast<double>(r.lower) - 0.5;
        const double hi = static_cast<double>(r.upper) + 0.5;
        double v = center;
        for (int attempt = 0; attempt < 64; ++attempt) {
            v = rng.normal(center, bandwidth_[dim]);
            if (v >= lo && v <= hi) {
                break;
            }
        }
        const auto rounded = static_cast<std::int64_t>(std::llround(v));
        return std::clamp(rounded, r.lower, r.upper);
    }

    std::vector<ParameterPoint> observations_;
    SearchSpace space_;
    std::array<double, SearchSpace::kDims> bandwidth_{};
    double prior_weight_ = 1.0;
    double total_weight_ = 1.0;
};

struct TpeProposal {
    ParameterPoint point;
    std::vector<ParameterPoint> candidates;
    std::vector<double> log_ratio; // log l(x) - log g(x) per candidate
    std::size_t chosen = 0;
};

inline TpeProposal tpe_propose(std::span<const ParameterPoint> good, std::span<const ParameterPoint> bad,
                               const SearchSpace& space, const TpeConfig& config, Rng& rng)
{
    if (good.empty()) {
        throw std::invalid_argument("tpe_propose: good set is empty");
    }
    const ParzenEstimator l({good.begin(), good.end()}, space, config);
    const ParzenEstimator g({bad.begin(), bad.end()}, space, config);
    TpeProposal out;
    out.candidates.reserve(config.candidate_count);
    for (std::size_t c = 0; c < config.candidate_count; ++c) {
        out.candidates.push_back(l.sample(rng));
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < out.candidates.size(); ++c) {
        const double score = l.log_pmf(out.candidates[c]) - g.log_pmf(out.candidates[c]);
        out.log_ratio.push_back(score);
        if (score > best) {
            best = score;
            out.chosen = c;
        }
    }
    out.point = out.candidates[out.chosen];
    return out;
}

} // namespace commission
