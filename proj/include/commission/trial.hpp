#pragma once

#include "commission/metrics.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace commission {

struct ParameterPoint {
    std::int64_t kp = 0;
    std::int64_t ki = 0;
    friend auto operator<=>(const ParameterPoint&, const ParameterPoint&) = default;
};

enum class TrialPhase { startup, model };

inline const char* to_string(TrialPhase p) { return p == TrialPhase::startup ? "startup" : "model"; }

struct RegisterWrite {
    std::string name;
    std::uint32_t address = 0;
    std::int64_t value = 0;
    friend bool operator==(const RegisterWrite&, const RegisterWrite&) = default;
};

// One evaluated controller configuration.
struct TrialRecord {
    std::size_t trial_index = 0;
    ParameterPoint point;
    ObjectiveVector objectives;
    double duration_ms = 0.0;
    bool stable = true;
    TrialPhase phase = TrialPhase::startup;
    std::vector<RegisterWrite> register_writes;

    // Failed trials carry non-finite objectives and are excluded from modelling.
    bool valid() const { return objectives.finite(); }
};

} // namespace commission
