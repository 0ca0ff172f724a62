#pragma once

// Ask/tell study state shared by all samplers.

#include "commission/error.hpp"
#include "commission/gp.hpp"
#include "commission/pareto.hpp"
#include "commission/rng.hpp"
#include "commission/search_space.hpp"
#include "commission/tpe.hpp"
#include "commission/trial.hpp"

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace commission {

enum class SamplerKind { tpe, gp, random };

inline constexpr std::size_t kDefaultStartupTrials = 10;

inline const char* to_string(SamplerKind k)
{
    switch (k) {
    case SamplerKind::tpe: return "tpe";
    case SamplerKind::gp: return "gp";
    case SamplerKind::random: return "random";
    }
    return "?";
}

inline SamplerKind parse_sampler(std::string_view name)
{
    if (name == "tpe") {
        return SamplerKind::tpe;
    }
    if (name == "gp") {
        return SamplerKind::gp;
    }
    if (name == "random" || name == "rs") {
        return SamplerKind::random;
    }
    throw ConfigError("unknown sampler '" + std::string(name) + "' (valid: tpe, gp, random)");
}

struct SamplerSettings {
    SamplerKind kind = SamplerKind::tpe;
    std::size_t startup_trials = kDefaultStartupTrials;
    TpeConfig tpe;
    GpConfig gp;
};

class Study {
public:
    Study(SearchSpace space, SamplerSettings settings, std::uint64_t seed)
        : space_(space), settings_(std::move(settings)), rng_(seed)
    {
        space_.validate();
        settings_.tpe.validate();
    }

    TrialPhase next_phase() const { return records_.size() < settings_.startup_trials ? TrialPhase::startup : TrialPhase::model; }

    // Startup trials are uniform for every sampler and consume the same draws.
    ParameterPoint ask()
    {
        if (next_phase() == TrialPhase::startup) {
            return random_propose(space_, rng_);
        }
        switch (settings_.kind) {
        case SamplerKind::random: return random_propose(space_, rng_);
        case SamplerKind::tpe: return ask_tpe();
        case SamplerKind::gp: return ask_gp();
        }
        return random_propose(space_, rng_);
    }

    const TrialRecord& tell(const ParameterPoint& point, const ObjectiveVector& objectives, bool stable = true,
                            double duration_ms = 0.0, std::vector<RegisterWrite> writes = {})
    {
        TrialRecord r;
        r.trial_index = records_.size();
        r.point = point;
        r.objectives = objectives;
        r.stable = stable;
        r.duration_ms = duration_ms;
        r.phase = next_phase();
        r.register_writes = std::move(writes);
        return tell(std::move(r));
    }

    // Appends a fully formed record; the index and phase are reassigned.
    const TrialRecord& tell(TrialRecord r)
    {
        r.trial_index = records_.size();
        r.phase = next_phase();
        if (!r.valid()) {
            diagnostics_.push_back("trial " + std::to_string(r.trial_index) + ": non-finite objectives; excluded from model fitting");
        }
        front_.insert(r);
        records_.push_back(std::move(r));
        return records_.back();
    }

    const std::vector<TrialRecord>& records() const noexcept { return records_; }
    const ParetoFront& front() const noexcept { return front_; }
    const SearchSpace& space() const noexcept { return space_; }
    const SamplerSettings& settings() const noexcept { return settings_; }
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }
    const Rng& rng() const noexcept { return rng_; }

    std::vector<TrialRecord> valid_records() const
    {
        std::vector<TrialRecord> out;
        for (const auto& r : records_) {
            if (r.valid()) {
                out.push_back(r);
            }
        }
        return out;
    }

    // Hash of the trial sequence, the front membership and the RNG state.
    std::uint64_t fingerprint() const
    {
        std::uint64_t h = fnv1a(to_string(settings_.kind));
        char buf[160];
        for (const auto& r : records_) {
            std::snprintf(buf, sizeof buf, "%zu|%lld|%lld|%a|%a|%a|%a|%d;", r.trial_index, static_cast<long long>(r.point.kp),
                          static_cast<long long>(r.point.ki), r.objectives.iae, r.objectives.itae, r.objectives.os,
                          r.objectives.osc, r.stable ? 1 : 0);
            h = fnv1a(buf, h);
        }
        for (const auto& m : front_.members()) {
            h = fnv1a(std::to_string(m.trial_index) + ",", h);
        }
        return fnv1a(rng_.state(), h);
    }

private:
    ParameterPoint ask_tpe()
    {
        const auto valid = valid_records();
        if (valid.size() < 2) {
            diagnostics_.push_back("tpe: fewer than two valid trials; random proposal used");
            return random_propose(space_, rng_);
        }
        std::vector<ObjectivePoint> objs;
        for (const auto& r : valid) {
            objs.push_back(r.objectives.as_array());
        }
        const auto split = tpe_split(objs, settings_.tpe.gamma_fraction);
        std::vector<ParameterPoint> good;
        std::vector<ParameterPoint> bad;
        for (const auto i : split.good) {
            good.push_back(valid[i].point);
        }
        for (const auto i : split.bad) {
            bad.push_back(valid[i].point);
        }
        return tpe_propose(good, bad, space_, settings_.tpe, rng_).point;
    }

    ParameterPoint ask_gp()
    {
        const auto valid = valid_records();
        return gp_propose(valid, space_, rng_, settings_.gp, &diagnostics_).point;
    }

    SearchSpace space_;
    SamplerSettings settings_;
    Rng rng_;
    std::vector<TrialRecord> records_;
    ParetoFront front_;
    std::vector<std::string> diagnostics_;
};

} // namespace commission
