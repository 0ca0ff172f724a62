#pragma once

// Scalarized Gaussian-process baseline: a random augmented-Chebyshev weight
// per iteration, a Matern-5/2 GP with fitted noise on the unit square, and
// expected improvement maximized over a shifted Halton pool.

#include "commission/pareto.hpp"
#include "commission/rng.hpp"
#include "commission/search_space.hpp"
#include "commission/trial.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace commission {

struct GpConfig {
    std::size_t pool_size = 2048;
    double chebyshev_rho = 0.05;
    std::vector<double> lengthscales{0.05, 0.1, 0.2, 0.35, 0.6, 1.0};
    std::vector<double> noise_levels{1e-6, 1e-4, 1e-3, 1e-2, 1e-1};
    double initial_jitter = 1e-10;
    double max_jitter = 1e-4;
};

inline double matern52(double r, double lengthscale)
{
    const double s = std::sqrt(5.0) * r / lengthscale;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

// Zero-mean, unit-signal-variance GP regressor on 2-D inputs.
class GaussianProcess {
public:
    using Inputs = std::vector<std::array<double, 2>>;

    // Returns nullopt when the covariance stays singular under every jitter level.
    static std::optional<GaussianProcess> fit(Inputs x, Eigen::VectorXd y, double lengthscale, double noise,
                                              double jitter = 1e-10, double max_jitter = 1e-4)
    {
        GaussianProcess gp;
        gp.x_ = std::move(x);
        gp.lengthscale_ = lengthscale;
        gp.noise_ = noise;
        const auto n = static_cast<Eigen::Index>(gp.x_.size());
        Eigen::MatrixXd k(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) {
                k(i, j) = k(j, i) = matern52(distance(gp.x_[i], gp.x_[j]), lengthscale);
            }
        }
        for (double jit = jitter; jit <= max_jitter * (1 + 1e-12); jit *= 10.0) {
            Eigen::MatrixXd kn = k;
            kn.diagonal().array() += noise + jit;
            gp.chol_.compute(kn);
            if (gp.chol_.info() == Eigen::Success) {
                gp.jitter_ = jit;
                gp.alpha_ = gp.chol_.solve(y);
                const Eigen::MatrixXd l = gp.chol_.matrixL();
                gp.log_marginal_ = -0.5 * y.dot(gp.alpha_) - l.diagonal().array().log().sum() -
                                   0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
                gp.y_ = std::move(y);
                return gp;
            }
        }
        return std::nullopt;
    }

    struct Prediction {
        double mean = 0.0;
        double variance = 0.0;
    };

    Prediction predict(const std::array<double, 2>& q) const
    {
        const auto n = static_cast<Eigen::Index>(x_.size());
        Eigen::VectorXd ks(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            ks(i) = matern52(distance(q, x_[i]), lengthscale_);
        }
        const Eigen::VectorXd v = chol_.matrixL().solve(ks);
        return {ks.dot(alpha_), std::max(0.0, 1.0 - v.squaredNorm())};
    }

    // Batched prediction; column j of the result holds (mean, variance).
    std::vector<Prediction> predict(std::span<const std::array<double, 2>> queries) const
    {
        const auto n = static_cast<Eigen::Index>(x_.size());
        const auto m = static_cast<Eigen::Index>(queries.size());
        Eigen::MatrixXd ks(n, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) {
                ks(i, j) = matern52(distance(queries[static_cast<std::size_t>(j)], x_[static_cast<std::size_t>(i)]), lengthscale_);
            }
        }
        const Eigen::VectorXd means = ks.transpose() * alpha_;
        const Eigen::MatrixXd v = chol_.matrixL().solve(ks);
        const Eigen::VectorXd reduction = v.colwise().squaredNorm();
        std::vector<Prediction> out(static_cast<std::size_t>(m));
        for (Eigen::Index j = 0; j < m; ++j) {
            out[static_cast<std::size_t>(j)] = {means(j), std::max(0.0, 1.0 - reduction(j))};
        }
        return out;
    }

    double log_marginal_likelihood() const noexcept { return log_marginal_; }
    double lengthscale() const noexcept { return lengthscale_; }
    double noise() const noexcept { return noise_; }
    double jitter() const noexcept { return jitter_; }

private:
    static double distance(const std::array<double, 2>& a, const std::array<double, 2>& b)
    {
        return std::hypot(a[0] - b[0], a[1] - b[1]);
    }

    Inputs x_;
    Eigen::VectorXd y_;
    Eigen::VectorXd alpha_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    double lengthscale_ = 1.0;
    double noise_ = 0.0;
    double jitter_ = 0.0;
    double log_marginal_ = -std::numeric_limits<double>::infinity();
};

// Radical inverse in `base`, for Halton sequences.
inline double radical_inverse(std::size_t index, std::size_t base)
{
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

inline std::array<double, 2> to_unit(const SearchSpace& space, const ParameterPoint& p)
{
    return {static_cast<double>(p.kp - space.ranges[0].lower) / static_cast<double>(space.ranges[0].width()),
            static_cast<double>(p.ki - space.ranges[1].lower) / static_cast<double>(space.ranges[1].width())};
}

inline double expected_improvement(double best, double mean, double variance)
{
    const double sd = std::sqrt(variance);
    const double gain = best - mean;
    if (sd < 1e-12) {
        return std::max(0.0, gain);
    }
    const double z = gain / sd;
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return gain * cdf + sd * pdf;
}

struct GpProposal {
    ParameterPoint point;
    bool fallback = false; // true when no covariance could be factorized
    std::size_t pool_index = 0;
    double expected_improvement = 0.0;
    double lengthscale = 0.0;
    double noise = 0.0;
    std::array<double, kObjectiveCount> weights{};
};

inline GpProposal gp_propose(std::span<const TrialRecord> records, const SearchSpace& space, Rng& rng,
                             const GpConfig& config = {}, std::vector<std::string>* diagnostics = nullptr)
{
    GpProposal out;

    // Dirichlet(1, ..., 1) weights.
    double wsum = 0.0;
    for (auto& w : out.weights) {
        w = -std::log(1.0 - rng.uniform01());
        wsum += w;
    }
    for (auto& w : out.weights) {
        w /= wsum;
    }
    const std::array<double, 2> shift{rng.uniform01(), rng.uniform01()};

    const auto bounds = NormalizationBounds::from_records(records);
    GaussianProcess::Inputs x;
    std::vector<double> s;
    for (const auto& r : records) {
        if (!r.valid()) {
            continue;
        }
        const auto f = bounds.normalize(r.objectives.as_array());
        double worst = 0.0;
        double total = 0.0;
        for (std::size_t m = 0; m < kObjectiveCount; ++m) {
            worst = std::max(worst, out.weights[m] * f[m]);
            total += out.weights[m] * f[m];
        }
        s.push_back(worst + config.chebyshev_rho * total);
        x.push_back(to_unit(space, r.point));
    }

    const auto n = static_cast<Eigen::Index>(s.size());
    Eigen::VectorXd y(n);
    double mean = 0.0;
    for (const double v : s) {
        mean += v;
    }
    mean /= static_cast<double>(std::max<Eigen::Index>(n, 1));
    double var = 0.0;
    for (const double v : s) {
        var += (v - mean) * (v - mean);
    }
    const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = sd > 1e-12 ? (s[static_cast<std::size_t>(i)] - mean) / sd : 0.0;
    }

    std::optional<GaussianProcess> best_gp;
    if (n > 0) {
        for (const double ls : config.lengthscales) {
            for (const double noise : config.noise_levels) {
                auto gp = GaussianProcess::fit(x, y, ls, noise, config.initial_jitter, config.max_jitter);
                if (gp && (!best_gp || gp->log_marginal_likelihood() > best_gp->log_marginal_likelihood())) {
                    best_gp = std::move(gp);
                }
            }
        }
    }
    if (!best_gp) {
        if (diagnostics != nullptr) {
            diagnostics->push_back("gp: covariance singular under all jitter levels; random proposal used");
        }
        out.fallback = true;
        out.point = random_propose(space, rng);
        return out;
    }
    out.lengthscale = best_gp->lengthscale();
    out.noise = best_gp->noise();

    std::vector<ParameterPoint> pool;
    std::vector<std::array<double, 2>> unit;
    pool.reserve(config.pool_size);
    unit.reserve(config.pool_size);
    for (std::size_t j = 0; j < config.pool_size; ++j) {
        ParameterPoint p;
        for (std::size_t d = 0; d < SearchSpace::kDims; ++d) {
            double u = radical_inverse(j + 1, d == 0 ? 2 : 3) + shift[d];
            u -= std::floor(u);
            const auto& r = space.ranges[d];
            const auto v = std::min(r.upper, r.lower + static_cast<std::int64_t>(u * static_cast<double>(r.width() + 1)));
            (d == 0 ? p.kp : p.ki) = v;
        }
        pool.push_back(p);
        unit.push_back(to_unit(space, p));
    }

    const double incumbent = n > 0 ? y.minCoeff() : 0.0;
    const auto preds = best_gp->predict(unit);
    double best_ei = -1.0;
    for (std::size_t j = 0; j < pool.size(); ++j) {
        const double ei = expected_improvement(incumbent, preds[j].mean, preds[j].variance);
        if (ei > best_ei) {
            best_ei = ei;
            out.pool_index = j;
        }
    }
    out.point = pool[out.pool_index];
    out.expected_improvement = best_ei;
    return out;
}

} // namespace commission
