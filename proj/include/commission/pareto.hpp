#pragma once

// Non-domination bookkeeping, min-max normalization and exact hypervolume.

#include "commission/metrics.hpp"
#include "commission/trial.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace commission {

using ObjectivePoint = std::array<double, kObjectiveCount>;

// Minimization: a <= b everywhere and a < b somewhere.
template <typename Vec>
bool dominates(const Vec& a, const Vec& b)
{
    bool strictly = false;
    for (std::size_t m = 0; m < std::size(a); ++m) {
        if (a[m] > b[m]) {
            return false;
        }
        strictly = strictly || a[m] < b[m];
    }
    return strictly;
}

inline bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) { return dominates(a.as_array(), b.as_array()); }

// Front ranks by repeated peeling: rank 0 is non-dominated, rank 1 is
// non-dominated once rank 0 is removed, and so on.
template <typename Vec>
std::vector<std::size_t> non_dominated_ranks(std::span<const Vec> points)
{
    const std::size_t n = points.size();
    std::vector<std::size_t> dominated_by(n, 0);
    std::vector<std::vector<std::size_t>> dominating(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(points[i], points[j])) {
                dominating[i].push_back(j);
                ++dominated_by[j];
            } else if (dominates(points[j], points[i])) {
                dominating[j].push_back(i);
                ++dominated_by[i];
            }
        }
    }
    std::vector<std::size_t> rank(n, 0);
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        if (dominated_by[i] == 0) {
            current.push_back(i);
        }
    }
    std::size_t r = 0;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (const auto i : current) {
            rank[i] = r;
            for (const auto j : dominating[i]) {
                if (--dominated_by[j] == 0) {
                    next.push_back(j);
                }
            }
        }
        current = std::move(next);
        ++r;
    }
    return rank;
}

// Non-dominated subset of trial records. One representative is kept per
// distinct objective vector (the first inserted).
class ParetoFront {
public:
    // Returns true when the record joined the front.
    bool insert(const TrialRecord& record)
    {
        if (!record.valid()) {
            return false;
        }
        for (const auto& m : members_) {
            if (m.objectives == record.objectives || dominates(m.objectives, record.objectives)) {
                return false;
            }
        }
        std::erase_if(members_, [&](const TrialRecord& m) { return dominates(record.objectives, m.objectives); });
        members_.push_back(record);
        return true;
    }

    const std::vector<TrialRecord>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }

    std::vector<ObjectivePoint> points() const
    {
        std::vector<ObjectivePoint> out;
        out.reserve(members_.size());
        for (const auto& m : members_) {
            out.push_back(m.objectives.as_array());
        }
        return out;
    }

    bool contains_trial(std::size_t trial_index) const
    {
        return std::any_of(members_.begin(), members_.end(), [&](const TrialRecord& m) { return m.trial_index == trial_index; });
    }

private:
    std::vector<TrialRecord> members_;
};

// Per-objective (min, max) over a declared population.
class NormalizationBounds {
public:
    NormalizationBounds()
    {
        lo_.fill(std::numeric_limits<double>::infinity());
        hi_.fill(-std::numeric_limits<double>::infinity());
    }

    static NormalizationBounds from_points(std::span<const ObjectivePoint> pts)
    {
        NormalizationBounds b;
        for (const auto& p : pts) {
            b.include(p);
        }
        return b;
    }

    static NormalizationBounds from_records(std::span<const TrialRecord> records)
    {
        NormalizationBounds b;
        for (const auto& r : records) {
            if (r.valid()) {
                b.include(r.objectives.as_array());
            }
        }
        return b;
    }

    void include(const ObjectivePoint& p)
    {
        for (std::size_t m = 0; m < kObjectiveCount; ++m) {
            lo_[m] = std::min(lo_[m], p[m]);
            hi_[m] = std::max(hi_[m], p[m]);
        }
    }

    bool empty() const noexcept { return lo_[0] > hi_[0]; }
    const ObjectivePoint& min() const noexcept { return lo_; }
    const ObjectivePoint& max() const noexcept { return hi_; }

    // Maps into [0,1]; degenerate components map to 0. Out-of-range values
    // are clamped and counted in `clamped`.
    ObjectivePoint normalize(const ObjectivePoint& v, std::size_t* clamped = nullptr) const
    {
        ObjectivePoint out{};
        for (std::size_t m = 0; m < kObjectiveCount; ++m) {
            const double range = hi_[m] - lo_[m];
            if (!(range > 0.0)) {
                out[m] = 0.0;
                if (clamped != nullptr && v[m] != lo_[m]) {
                    ++*clamped;
                }
                continue;
            }
            double x = (v[m] - lo_[m]) / range;
            if (x < 0.0 || x > 1.0) {
                x = std::clamp(x, 0.0, 1.0);
                if (clamped != nullptr) {
                    ++*clamped;
                }
            }
            out[m] = x;
        }
        return out;
    }

    std::vector<ObjectivePoint> normalize(std::span<const ObjectivePoint> pts, std::size_t* clamped = nullptr) const
    {
        std::vector<ObjectivePoint> out;
        out.reserve(pts.size());
        for (const auto& p : pts) {
            out.push_back(normalize(p, clamped));
        }
        return out;
    }

private:
    ObjectivePoint lo_;
    ObjectivePoint hi_;
};

inline constexpr double kReferenceMargin = 1e-9;

struct ReferencePoint {
    ObjectivePoint coords{1.0 + kReferenceMargin, 1.0 + kReferenceMargin, 1.0 + kReferenceMargin, 1.0 + kReferenceMargin};
};

namespace detail {

// Union volume of boxes [p, ref] using the first `dims` coordinates, by
// slicing along the last active coordinate.
inline double hypervolume_slices(std::vector<ObjectivePoint> pts, const ObjectivePoint& ref, std::size_t dims)
{
    if (pts.empty()) {
        return 0.0;
    }
    if (dims == 1) {
        double best = ref[0];
        for (const auto& p : pts) {
            best = std::min(best, p[0]);
        }
        return ref[0] - best;
    }
    if (dims == 2) {
        std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]); });
        double area = 0.0;
        double ceiling = ref[1];
        for (const auto& p : pts) {
            if (p[1] < ceiling) {
                area += (ref[0] - p[0]) * (ceiling - p[1]);
                ceiling = p[1];
            }
        }
        return area;
    }
    const std::size_t axis = dims - 1;
    std::sort(pts.begin(), pts.end(), [axis](const auto& a, const auto& b) { return a[axis] < b[axis]; });
    double volume = 0.0;
    std::vector<ObjectivePoint> active;
    active.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        bool covered = false;
        for (const auto& q : active) {
            bool weakly = true;
            for (std::size_t m = 0; m < axis; ++m) {
                if (q[m] > p[m]) {
                    weakly = false;
                    break;
                }
            }
            if (weakly) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            std::erase_if(active, [&](const ObjectivePoint& q) {
                for (std::size_t m = 0; m < axis; ++m) {
                    if (p[m] > q[m]) {
                        return false;
                    }
                }
                return true;
            });
            active.push_back(p);
        }
        const double upper = i + 1 < pts.size() ? pts[i + 1][axis] : ref[axis];
        if (upper > p[axis]) {
            volume += hypervolume_slices(active, ref, axis) * (upper - p[axis]);
        }
    }
    return volume;
}

} // namespace detail

// Exact Lebesgue measure of the union of boxes [p, ref]. Points on the
// reference boundary contribute nothing; points beyond it are rejected.
inline double hypervolume(std::span<const ObjectivePoint> points, const ReferencePoint& ref = {})
{
    std::vector<ObjectivePoint> inside;
    inside.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool strictly_inside = true;
        for (std::size_t m = 0; m < kObjectiveCount; ++m) {
            if (!(points[i][m] <= ref.coords[m])) {
                throw std::invalid_argument("hypervolume: point " + std::to_string(i) + " exceeds the reference point");
            }
            strictly_inside = strictly_inside && points[i][m] < ref.coords[m];
        }
        if (strictly_inside) {
            inside.push_back(points[i]);
        }
    }
    return detail::hypervolume_slices(std::move(inside), ref.coords, kObjectiveCount);
}

// Element t is the hypervolume of the non-dominated subset of records [0, t].
inline std::vector<double> hypervolume_trace(std::span<const TrialRecord> records, const NormalizationBounds& bounds,
                                             const ReferencePoint& ref = {}, std::size_t* clamped = nullptr)
{
    std::vector<double> out;
    out.reserve(records.size());
    ParetoFront front;
    double current = 0.0;
    for (const auto& r : records) {
        if (front.insert(r)) {
            const auto pts = bounds.normalize(front.points(), clamped);
            current = hypervolume(pts, ref);
        }
        out.push_back(current);
    }
    return out;
}

} // namespace commission
