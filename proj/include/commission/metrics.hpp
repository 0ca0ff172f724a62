#pragma once

// Control-quality objectives computed from one acquired trace. All four are
// dimensionless and minimized.

#include "commission/error.hpp"
#include "commission/signals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace commission {

inline constexpr std::size_t kObjectiveCount = 4;
inline constexpr std::array<const char*, kObjectiveCount> kObjectiveNames{"iae", "itae", "os", "osc"};

// Component order (IAE, ITAE, OS, OSC) is fixed everywhere.
struct ObjectiveVector {
    double iae = 0.0;
    double itae = 0.0;
    double os = 0.0;
    double osc = 0.0;

    static ObjectiveVector from_array(const std::array<double, kObjectiveCount>& a) { return {a[0], a[1], a[2], a[3]}; }

    std::array<double, kObjectiveCount> as_array() const { return {iae, itae, os, osc}; }

    double operator[](std::size_t m) const
    {
        switch (m) {
        case 0: return iae;
        case 1: return itae;
        case 2: return os;
        case 3: return osc;
        default: throw std::out_of_range("objective index");
        }
    }

    bool finite() const { return std::isfinite(iae) && std::isfinite(itae) && std::isfinite(os) && std::isfinite(osc); }

    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

struct NormalizationBase {
    double d = 0.0;
};

inline NormalizationBase compute_d(const SignalTrace& trace)
{
    const auto [lo, hi] = std::minmax_element(trace.reference().begin(), trace.reference().end());
    const double d = *hi - *lo;
    if (!(d > 0.0)) {
        throw DegenerateExcitation("reference has zero range; the excitation must contain a nonzero step");
    }
    return {d};
}

inline double iae(const SignalTrace& trace, NormalizationBase base)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        sum += std::abs(trace.error(i));
    }
    return sum / (static_cast<double>(trace.size()) * base.d);
}

// Weight runs over the sample index, i / (N - 1).
inline double itae(const SignalTrace& trace, NormalizationBase base)
{
    const std::size_t n = trace.size();
    if (n < 2) {
        throw std::invalid_argument("itae: time weight undefined for a single sample");
    }
    const double last = static_cast<double>(n - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += (static_cast<double>(i) / last) * std::abs(trace.error(i));
    }
    return sum / base.d;
}

// Worst sign-projected excursion past the new level over the segment that
// follows each transition, relative to the step size.
inline double overshoot(const SignalTrace& trace, const SegmentMap& segments)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < segments.transitions.size(); ++k) {
        if (k + 1 >= segments.segments.size()) {
            break;
        }
        const auto& t = segments.transitions[k];
        const auto& seg = segments.segments[k + 1];
        const double sigma = static_cast<double>(t.sign);
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t i = seg.start; i <= seg.end; ++i) {
            peak = std::max(peak, sigma * trace.response()[i]);
        }
        const double local = std::max(0.0, (peak - sigma * seg.level) / std::abs(t.delta));
        worst = std::max(worst, local);
    }
    return worst;
}

// RMS of the zero-mean error on one segment, normalized by d.
inline double segment_oscillation(const SignalTrace& trace, const Segment& seg, NormalizationBase base)
{
    const double len = static_cast<double>(seg.length());
    double mean = 0.0;
    for (std::size_t i = seg.start; i <= seg.end; ++i) {
        mean += trace.error(i);
    }
    mean /= len;
    double ss = 0.0;
    for (std::size_t i = seg.start; i <= seg.end; ++i) {
        const double dev = trace.error(i) - mean;
        ss += dev * dev;
    }
    return std::sqrt(ss / len) / base.d;
}

inline double oscillation(const SignalTrace& trace, const SegmentMap& segments, NormalizationBase base)
{
    double active = 0.0;
    double zero = 0.0;
    for (const auto& seg : segments.segments) {
        const double v = segment_oscillation(trace, seg, base);
        double& slot = seg.kind == SegmentKind::active ? active : zero;
        slot = std::max(slot, v);
    }
    return std::max(active, zero);
}

inline ObjectiveVector evaluate_objectives(const SignalTrace& trace, double zero_tolerance = kDefaultZeroTolerance)
{
    const auto base = compute_d(trace);
    const auto segments = detect_segments(trace.reference(), zero_tolerance);
    return {iae(trace, base), itae(trace, base), overshoot(trace, segments), oscillation(trace, segments, base)};
}

} // namespace commission
