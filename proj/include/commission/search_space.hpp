#pragma once

#include "commission/rng.hpp"
#include "commission/trial.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace commission {

struct IntegerRange {
    std::string name;
    std::int64_t lower = 0;
    std::int64_t upper = 0;

    std::int64_t width() const noexcept { return upper - lower; }
    bool contains(std::int64_t v) const noexcept { return v >= lower && v <= upper; }
};

// Integer box over (Kp, Ki).
struct SearchSpace {
    static constexpr std::size_t kDims = 2;

    std::array<IntegerRange, kDims> ranges{{{"kp", 500, 10000}, {"ki", 500, 10000}}};

    static SearchSpace make(std::int64_t kp_lo, std::int64_t kp_hi, std::int64_t ki_lo, std::int64_t ki_hi)
    {
        SearchSpace s{{{{"kp", kp_lo, kp_hi}, {"ki", ki_lo, ki_hi}}}};
        s.validate();
        return s;
    }

    void validate() const
    {
        for (const auto& r : ranges) {
            if (!(r.lower < r.upper)) {
                throw std::invalid_argument("search space: '" + r.name + "' needs lower < upper");
            }
        }
    }

    bool contains(const ParameterPoint& p) const { return ranges[0].contains(p.kp) && ranges[1].contains(p.ki); }

    static std::int64_t coord(const ParameterPoint& p, std::size_t dim) { return dim == 0 ? p.kp : p.ki; }
};

// Uniform integer point; consumes exactly two engine draws for the default
// bounds, so every sampler shares the same startup sequence.
inline ParameterPoint random_propose(const SearchSpace& space, Rng& rng)
{
    const auto kp = rng.uniform_int(space.ranges[0].lower, space.ranges[0].upper);
    const auto ki = rng.uniform_int(space.ranges[1].lower, space.ranges[1].upper);
    return {kp, ki};
}

} // namespace commission
