#pragma once

// Straight-from-the-definition metric oracle shared by the unit and
// acceptance tests. It does its own run detection and uses no library code.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "commission/rng.hpp"

namespace oracle {

inline bool rel_close(double a, double b, double rel)
{
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= rel * scale || std::abs(a - b) <= 1e-15;
}

// Random piecewise-constant reference with at least one nonzero step and a
// noisy response around it.
inline std::pair<std::vector<double>, std::vector<double>> random_trace(commission::Rng& rng)
{
    std::vector<double> r;
    const auto segs = rng.uniform_int(1, 6);
    bool nonzero = false;
    double prev = 1e300;
    for (std::int64_t k = 0; k < segs; ++k) {
        double level;
        do {
            level = rng.uniform_int(0, 2) == 0 ? 0.0 : std::round(rng.uniform(-4, 4) * 8.0) / 8.0;
        } while (level == prev);
        prev = level;
        nonzero = nonzero || level != 0.0;
        const auto len = rng.uniform_int(1, 40);
        r.insert(r.end(), static_cast<std::size_t>(len), level);
    }
    if (!nonzero || segs == 1) {
        r.push_back(r.back() == 1.5 ? -1.5 : 1.5);
    }
    std::vector<double> y(r.size());
    double state = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        state += 0.3 * (r[i] - state);
        y[i] = state + rng.normal(0.0, 0.2);
    }
    return {r, y};
}

// Objectives as literally defined: d = range of r, IAE, ITAE, OS per
// transition over the following run, OSC as the worst zero-mean RMS per run.
inline std::array<double, 4> naive_objectives(const std::vector<double>& r, const std::vector<double>& y)
{
    const std::size_t n = r.size();
    const double d = *std::max_element(r.begin(), r.end()) - *std::min_element(r.begin(), r.end());

    double iae = 0.0;
    double itae = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::abs(r[i] - y[i]);
        iae += e;
        itae += (static_cast<double>(i) / static_cast<double>(n - 1)) * e;
    }
    iae /= static_cast<double>(n) * d;
    itae /= d;

    // Runs as [begin, end) pairs.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 == n || r[i + 1] != r[i]) {
            runs.emplace_back(b, i + 1);
            b = i + 1;
        }
    }

    double os = 0.0;
    for (std::size_t k = 1; k < runs.size(); ++k) {
        const double delta = r[runs[k].first] - r[runs[k - 1].first];
        const double sigma = delta > 0 ? 1.0 : -1.0;
        double peak = -1e300;
        for (std::size_t i = runs[k].first; i < runs[k].second; ++i) {
            peak = std::max(peak, sigma * y[i]);
        }
        os = std::max(os, std::max(0.0, (peak - sigma * r[runs[k].first]) / std::abs(delta)));
    }

    double osc = 0.0;
    for (const auto& [s, f] : runs) {
        double mean = 0.0;
        for (std::size_t i = s; i < f; ++i) {
            mean += r[i] - y[i];
        }
        mean /= static_cast<double>(f - s);
        double ss = 0.0;
        for (std::size_t i = s; i < f; ++i) {
            ss += (r[i] - y[i] - mean) * (r[i] - y[i] - mean);
        }
        osc = std::max(osc, std::sqrt(ss / static_cast<double>(f - s)) / d);
    }
    return {iae, itae, os, osc};
}

} // namespace oracle
