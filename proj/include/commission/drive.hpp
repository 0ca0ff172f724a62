#pragma once

// Hardware boundary: write gains, excite, acquire. Two backends are
// provided, a discrete-time d-axis current-loop simulator and a register-map
// stub that reproduces the real-drive register workflow without a bus.

#include "commission/error.hpp"
#include "commission/kv_config.hpp"
#include "commission/metrics.hpp"
#include "commission/rng.hpp"
#include "commission/search_space.hpp"
#include "commission/signals.hpp"
#include "commission/trial.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace commission {

// First-order R-L plant behind a saturated PI loop. Integer gains map to
// physical gains as kp / kp_scale [V/A] and ki / ki_scale [V/(A s)].
struct PlantModel {
    double resistance = 6.0;     // ohm
    double inductance = 9e-3;    // henry
    double v_max = 325.0;        // volt, 230 V line peak
    double sample_period = kDefaultSamplePeriod;
    double noise_std = 0.0127;   // ampere, 0.5% of rated peak
    double kp_scale = 25.0;
    double ki_scale = 0.1;
    std::size_t latency_samples = 2;

    void validate() const
    {
        const auto positive = [](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw ConfigError(std::string("plant: ") + name + " must be > 0");
            }
        };
        positive(resistance, "resistance");
        positive(inductance, "inductance");
        positive(v_max, "v_max");
        positive(sample_period, "sample_period");
        positive(kp_scale, "kp_scale");
        positive(ki_scale, "ki_scale");
        if (!(noise_std >= 0.0)) {
            throw ConfigError("plant: noise_std must be >= 0");
        }
    }

    static PlantModel from_config(const KeyValueConfig& cfg) { return from_config(cfg, PlantModel{}); }

    static PlantModel from_config(const KeyValueConfig& cfg, PlantModel p)
    {
        p.resistance = cfg.get_double_or("plant.resistance", p.resistance);
        p.inductance = cfg.get_double_or("plant.inductance", p.inductance);
        p.v_max = cfg.get_double_or("plant.v_max", p.v_max);
        p.sample_period = cfg.get_double_or("plant.sample_period", p.sample_period);
        p.noise_std = cfg.get_double_or("plant.noise_std", p.noise_std);
        p.kp_scale = cfg.get_double_or("plant.kp_scale", p.kp_scale);
        p.ki_scale = cfg.get_double_or("plant.ki_scale", p.ki_scale);
        const auto lat = cfg.get_int_or("plant.latency_samples", static_cast<std::int64_t>(p.latency_samples));
        if (lat < 0) {
            throw ConfigError("plant: latency_samples must be >= 0");
        }
        p.latency_samples = static_cast<std::size_t>(lat);
        p.validate();
        return p;
    }
};

// Divergence threshold, in multiples of the reference range.
inline constexpr double kDivergenceFactor = 100.0;

struct Acquisition {
    SignalTrace trace;
    bool stable = true;
};

inline Acquisition simulate_trial(const PlantModel& plant, const ParameterPoint& gains, const ExcitationProfile& profile,
                                  Rng& rng)
{
    plant.validate();
    if (std::abs(profile.sample_period - plant.sample_period) > 1e-15 * plant.sample_period) {
        throw std::invalid_argument("simulate_trial: profile and plant sample periods differ");
    }
    const auto reference = render_profile(profile);
    const auto [rlo, rhi] = std::minmax_element(reference.begin(), reference.end());
    const double limit = kDivergenceFactor * (*rhi - *rlo);

    const double ts = plant.sample_period;
    const double kp = static_cast<double>(gains.kp) / plant.kp_scale;
    const double ki = static_cast<double>(gains.ki) / plant.ki_scale;
    const double step = ts / plant.inductance;

    std::vector<double> ref;
    std::vector<double> resp;
    ref.reserve(reference.size());
    resp.reserve(reference.size());
    const auto record = [&](std::size_t i, double y) {
        ref.push_back(reference[i]);
        resp.push_back(plant.noise_std > 0.0 ? y + rng.normal(0.0, plant.noise_std) : y);
    };

    double y = 0.0;
    double integral = 0.0;
    bool stable = true;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        record(i, y);
        const double r = i >= plant.latency_samples ? reference[i - plant.latency_samples] : 0.0;
        const double e = r - y;
        const double candidate = integral + e;
        double u = kp * e + ki * ts * candidate;
        if (std::abs(u) > plant.v_max) {
            u = std::copysign(plant.v_max, u);
        } else {
            integral = candidate;
        }
        y += step * (u - plant.resistance * y);
        if (!std::isfinite(y) || std::abs(y) > limit) {
            if (i + 1 < reference.size()) {
                record(i + 1, std::isfinite(y) ? y : std::copysign(limit, y));
            }
            stable = false;
            break;
        }
    }
    return {SignalTrace(std::move(ref), std::move(resp), ts), stable};
}

// Worst noise-free objectives over a coarse grid, times 10; assigned to
// trials whose response diverged.
inline ObjectiveVector unstable_sentinel(const PlantModel& plant, const ExcitationProfile& profile,
                                         const SearchSpace& space = {}, std::size_t grid = 12)
{
    PlantModel quiet = plant;
    quiet.noise_std = 0.0;
    Rng unused(0);
    std::array<double, kObjectiveCount> worst{};
    for (std::size_t a = 0; a < grid; ++a) {
        for (std::size_t b = 0; b < grid; ++b) {
            const auto at = [&](const IntegerRange& r, std::size_t k) {
                return r.lower + static_cast<std::int64_t>(std::llround(static_cast<double>(r.width()) *
                                                                         static_cast<double>(k) / static_cast<double>(grid - 1)));
            };
            const ParameterPoint p{at(space.ranges[0], a), at(space.ranges[1], b)};
            const auto acq = simulate_trial(quiet, p, profile, unused);
            if (!acq.stable) {
                continue;
            }
            const auto v = evaluate_objectives(acq.trace).as_array();
            for (std::size_t m = 0; m < kObjectiveCount; ++m) {
                worst[m] = std::max(worst[m], v[m]);
            }
        }
    }
    for (auto& w : worst) {
        w *= 10.0;
    }
    return ObjectiveVector::from_array(worst);
}

class DriveInterface {
public:
    virtual ~DriveInterface() = default;

    virtual void write_parameters(const ParameterPoint& gains) = 0;
    virtual void excite(const ExcitationProfile& profile) = 0;
    virtual Acquisition acquire() = 0;

    // Objectives recorded for a trial whose acquisition is flagged unstable.
    virtual ObjectiveVector unstable_objectives(const ExcitationProfile& profile) = 0;

    // Register writes issued since the last call.
    virtual std::vector<RegisterWrite> take_register_writes() { return {}; }

    Acquisition run_excitation(const ExcitationProfile& profile)
    {
        excite(profile);
        return acquire();
    }
};

class SimulatedDrive final : public DriveInterface {
public:
    SimulatedDrive(PlantModel plant, std::uint64_t noise_seed, SearchSpace space = {})
        : plant_(plant), rng_(noise_seed), space_(space)
    {
        plant_.validate();
    }

    void write_parameters(const ParameterPoint& gains) override { gains_ = gains; }

    void excite(const ExcitationProfile& profile) override
    {
        if (!gains_) {
            throw std::logic_error("simulated drive: excitation before any gains were written");
        }
        pending_ = simulate_trial(plant_, *gains_, profile, rng_);
    }

    Acquisition acquire() override
    {
        if (!pending_) {
            throw std::logic_error("simulated drive: nothing to acquire");
        }
        auto out = std::move(*pending_);
        pending_.reset();
        return out;
    }

    ObjectiveVector unstable_objectives(const ExcitationProfile& profile) override
    {
        std::ostringstream key;
        key << std::hexfloat << profile.sample_period;
        for (const auto& s : profile.segments) {
            key << ';' << s.level << ':' << s.duration;
        }
        auto it = sentinels_.find(key.str());
        if (it == sentinels_.end()) {
            it = sentinels_.emplace(key.str(), unstable_sentinel(plant_, profile, space_)).first;
        }
        return it->second;
    }

    const PlantModel& plant() const noexcept { return plant_; }
    std::optional<ParameterPoint> gains() const { return gains_; }

private:
    PlantModel plant_;
    Rng rng_;
    SearchSpace space_;
    std::optional<ParameterPoint> gains_;
    std::optional<Acquisition> pending_;
    std::map<std::string, ObjectiveVector> sentinels_;
};

struct RegisterEntry {
    std::string name;
    std::uint32_t address = 0; // byte address
    unsigned width = 16;       // bits

    std::uint64_t end() const noexcept { return static_cast<std::uint64_t>(address) + width / 8; }
};

// Names a drive configuration may declare; kp and ki are mandatory.
inline const std::set<std::string, std::less<>>& known_register_names()
{
    static const std::set<std::string, std::less<>> names{"kp", "ki", "profile_select", "excite_trigger",
                                                          "scope_status", "scope_reference", "scope_response"};
    return names;
}

class RegisterMap {
public:
    static RegisterMap parse(std::istream& in)
    {
        RegisterMap map;
        std::string line;
        std::size_t lineno = 0;
        std::map<std::string, std::size_t> lines;
        while (std::getline(in, line)) {
            ++lineno;
            std::string_view view = line;
            if (const auto hash = view.find('#'); hash != std::string_view::npos) {
                view = view.substr(0, hash);
            }
            view = trim(view);
            if (view.empty()) {
                continue;
            }
            const auto eq = view.find('=');
            const auto colon = view.find(':', eq == std::string_view::npos ? 0 : eq);
            if (eq == std::string_view::npos || colon == std::string_view::npos) {
                throw ParseError("expected 'name = address:width'", lineno);
            }
            RegisterEntry e;
            e.name = std::string(trim(view.substr(0, eq)));
            if (!known_register_names().contains(e.name)) {
                throw ParseError("unknown register '" + e.name + "'", lineno);
            }
            if (lines.contains(e.name)) {
                throw ParseError("duplicate register '" + e.name + "'", lineno);
            }
            std::int64_t address = 0;
            std::int64_t width = 0;
            try {
                address = parse_int(view.substr(eq + 1, colon - eq - 1), "address");
                width = parse_int(view.substr(colon + 1), "width");
            } catch (const ConfigError& err) {
                throw ParseError(err.what(), lineno);
            }
            if (address < 0 || address > 0xFFFFFFFFLL) {
                throw ParseError("address out of range", lineno);
            }
            if (width <= 0 || width > 64 || width % 8 != 0) {
                throw ParseError("width must be 8, 16, 24, ... 64 bits", lineno);
            }
            e.address = static_cast<std::uint32_t>(address);
            e.width = static_cast<unsigned>(width);
            for (const auto& other : map.entries_) {
                if (e.address < other.end() && other.address < e.end()) {
                    throw ParseError("register '" + e.name + "' overlaps '" + other.name + "'", lineno);
                }
            }
            lines.emplace(e.name, lineno);
            map.entries_.push_back(std::move(e));
        }
        for (const char* required : {"kp", "ki"}) {
            if (!lines.contains(required)) {
                throw ParseError(std::string("missing required register '") + required + "'", lineno);
            }
        }
        return map;
    }

    static RegisterMap parse_string(std::string_view text)
    {
        std::istringstream in{std::string(text)};
        return parse(in);
    }

    const std::vector<RegisterEntry>& entries() const noexcept { return entries_; }

    const RegisterEntry* find(std::string_view name) const
    {
        for (const auto& e : entries_) {
            if (e.name == name) {
                return &e;
            }
        }
        return nullptr;
    }

    const RegisterEntry& at(std::string_view name) const
    {
        if (const auto* e = find(name)) {
            return *e;
        }
        throw std::out_of_range("no register named '" + std::string(name) + "'");
    }

private:
    std::vector<RegisterEntry> entries_;
};

inline RegisterMap load_register_map(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open register map '" + path + "'");
    }
    return RegisterMap::parse(in);
}

enum class TrialStep { write, excite, acquire };

inline const char* to_string(TrialStep s)
{
    switch (s) {
    case TrialStep::write: return "write";
    case TrialStep::excite: return "excite";
    case TrialStep::acquire: return "acquire";
    }
    return "?";
}

// Backend failure during a trial; the trial may be retried.
class TrialError : public std::runtime_error {
public:
    TrialError(TrialStep step, const std::string& what)
        : std::runtime_error(std::string(to_string(step)) + ": " + what), step_(step)
    {
    }

    TrialStep step() const noexcept { return step_; }
    bool retriable() const noexcept { return true; }

private:
    TrialStep step_;
};

// Register-level stand-in for a real drive. Writes land in an in-memory
// register file; the "oscilloscope" returns whatever the response model
// produces for the rendered reference (perfect tracking by default).
class StubDrive final : public DriveInterface {
public:
    using ResponseModel = std::function<std::vector<double>(const std::vector<double>& reference)>;

    explicit StubDrive(RegisterMap map, ResponseModel model = {}) : map_(std::move(map)), model_(std::move(model)) {}

    void fail_at(std::optional<TrialStep> step) { fail_at_ = step; }

    void write_parameters(const ParameterPoint& gains) override
    {
        if (fail_at_ == TrialStep::write) {
            throw std::runtime_error("bus timeout while writing gains");
        }
        write("kp", gains.kp);
        write("ki", gains.ki);
    }

    void excite(const ExcitationProfile& profile) override
    {
        if (fail_at_ == TrialStep::excite) {
            throw std::runtime_error("drive rejected excitation");
        }
        if (map_.find("excite_trigger") != nullptr) {
            write("excite_trigger", 1);
        }
        reference_ = render_profile(profile);
        sample_period_ = profile.sample_period;
    }

    Acquisition acquire() override
    {
        if (fail_at_ == TrialStep::acquire) {
            throw std::runtime_error("oscilloscope buffer not ready");
        }
        if (reference_.empty()) {
            throw std::logic_error("stub drive: nothing to acquire");
        }
        auto response = model_ ? model_(reference_) : reference_;
        Acquisition out{SignalTrace(reference_, std::move(response), sample_period_), true};
        reference_.clear();
        return out;
    }

    ObjectiveVector unstable_objectives(const ExcitationProfile&) override
    {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, inf, inf};
    }

    std::vector<RegisterWrite> take_register_writes() override { return std::exchange(pending_writes_, {}); }

    std::optional<std::int64_t> read(std::string_view name) const
    {
        const auto& e = map_.at(name);
        const auto it = memory_.find(e.address);
        return it == memory_.end() ? std::nullopt : std::optional(it->second);
    }

    const std::vector<RegisterWrite>& history() const noexcept { return history_; }

private:
    void write(std::string_view name, std::int64_t value)
    {
        const auto& e = map_.at(name);
        if (e.width < 64 && (value < 0 || static_cast<std::uint64_t>(value) >> e.width != 0)) {
            throw std::out_of_range("value " + std::to_string(value) + " does not fit register '" + e.name + "'");
        }
        memory_[e.address] = value;
        RegisterWrite w{e.name, e.address, value};
        pending_writes_.push_back(w);
        history_.push_back(std::move(w));
    }

    RegisterMap map_;
    ResponseModel model_;
    std::optional<TrialStep> fail_at_;
    std::map<std::uint32_t, std::int64_t> memory_;
    std::vector<RegisterWrite> pending_writes_;
    std::vector<RegisterWrite> history_;
    std::vector<double> reference_;
    double sample_period_ = kDefaultSamplePeriod;
};

// One closed-loop experiment: write gains, excite, acquire, score.
inline TrialRecord run_trial(DriveInterface& drive, const ParameterPoint& gains, const ExcitationProfile& profile,
                             std::optional<SignalTrace>* trace_out = nullptr)
{
    const auto started = std::chrono::steady_clock::now();
    const auto guarded = [](TrialStep step, auto&& fn) {
        try {
            return fn();
        } catch (const TrialError&) {
            throw;
        } catch (const std::exception& e) {
            throw TrialError(step, e.what());
        }
    };
    guarded(TrialStep::write, [&] { drive.write_parameters(gains); return 0; });
    guarded(TrialStep::excite, [&] { drive.excite(profile); return 0; });
    auto acq = guarded(TrialStep::acquire, [&] { return drive.acquire(); });

    TrialRecord rec;
    rec.point = gains;
    rec.stable = acq.stable;
    rec.objectives = acq.stable ? evaluate_objectives(acq.trace) : drive.unstable_objectives(profile);
    rec.register_writes = drive.take_register_writes();
    rec.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    if (trace_out != nullptr) {
        *trace_out = std::move(acq.trace);
    }
    return rec;
}

} // namespace commission
