#pragma once

// Sampled traces, piecewise-constant excitation profiles and the
// decomposition of a reference into constant segments and transitions.

#include "commission/error.hpp"
#include "commission/kv_config.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace commission {

inline constexpr double kDefaultSamplePeriod = 50e-6;
inline constexpr double kDefaultZeroTolerance = 1e-6;

// 60% of the rated peak current of a 1.8 A (rms) motor.
inline constexpr double kTuningAmplitude = 1.53;
// -100% of the rated peak current.
inline constexpr double kValidationAmplitude = -2.55;

struct ProfileSegment {
    double level = 0.0;    // amperes
    double duration = 0.0; // seconds
};

struct ExcitationProfile {
    std::vector<ProfileSegment> segments;
    double sample_period = kDefaultSamplePeriod;

    // Checks everything except the sample-multiple rule, which render_profile reports per segment.
    void validate() const
    {
        if (!(sample_period > 0.0) || !std::isfinite(sample_period)) {
            throw std::invalid_argument("excitation profile: sample_period must be > 0");
        }
        if (segments.empty()) {
            throw std::invalid_argument("excitation profile: no segments");
        }
        bool any_nonzero = false;
        for (std::size_t k = 0; k < segments.size(); ++k) {
            const auto& s = segments[k];
            if (!std::isfinite(s.level)) {
                throw std::invalid_argument("excitation profile: segment " + std::to_string(k) + " has a non-finite level");
            }
            if (!(s.duration > 0.0)) {
                throw std::invalid_argument("excitation profile: segment " + std::to_string(k) + " has non-positive duration");
            }
            any_nonzero = any_nonzero || s.level != 0.0;
        }
        if (!any_nonzero) {
            throw std::invalid_argument("excitation profile: every segment is at zero level");
        }
    }

    std::size_t samples_in(std::size_t segment) const
    {
        const double ratio = segments.at(segment).duration / sample_period;
        const double rounded = std::round(ratio);
        if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
            throw std::invalid_argument("excitation profile: duration of segment " + std::to_string(segment) +
                                        " is not an integer multiple of the sample period");
        }
        return static_cast<std::size_t>(rounded);
    }
};

// Positive pulse used for tuning: amplitude for `pulse` seconds then zero for
// the same dwell.
inline ExcitationProfile tuning_profile(double amplitude = kTuningAmplitude, double pulse = 0.040,
                                        double sample_period = kDefaultSamplePeriod)
{
    return ExcitationProfile{{{amplitude, pulse}, {0.0, pulse}}, sample_period};
}

// Negative step used to check that tuned gains generalize.
inline ExcitationProfile validation_profile(double amplitude = kValidationAmplitude, double pulse = 0.060,
                                            double sample_period = kDefaultSamplePeriod)
{
    return ExcitationProfile{{{amplitude, pulse}, {0.0, pulse}}, sample_period};
}

inline std::vector<double> render_profile(const ExcitationProfile& profile)
{
    profile.validate();
    std::vector<double> samples;
    for (std::size_t k = 0; k < profile.segments.size(); ++k) {
        samples.insert(samples.end(), profile.samples_in(k), profile.segments[k].level);
    }
    return samples;
}

// Reads `<prefix>.segments = level:duration, ...` and `<prefix>.sample_period`.
inline ExcitationProfile profile_from_config(const KeyValueConfig& cfg, const std::string& prefix,
                                             const ExcitationProfile& fallback)
{
    ExcitationProfile p = fallback;
    p.sample_period = cfg.get_double_or(prefix + ".sample_period", fallback.sample_period);
    if (const auto text = cfg.get(prefix + ".segments")) {
        p.segments.clear();
        for (const auto& item : split(*text, ',')) {
            const auto parts = split(item, ':');
            if (parts.size() != 2) {
                throw ParseError("segment '" + item + "' is not level:duration", cfg.line_of(prefix + ".segments"));
            }
            p.segments.push_back({parse_double(parts[0], prefix + ".segments"), parse_double(parts[1], prefix + ".segments")});
        }
    }
    p.validate();
    return p;
}

class SignalTrace {
public:
    SignalTrace(std::vector<double> reference, std::vector<double> response, double sample_period)
        : reference_(std::move(reference)), response_(std::move(response)), sample_period_(sample_period)
    {
        if (reference_.size() != response_.size()) {
            throw std::invalid_argument("signal trace: reference and response lengths differ");
        }
        if (reference_.size() < 2) {
            throw std::invalid_argument("signal trace: at least two samples are required");
        }
        if (!(sample_period_ > 0.0)) {
            throw std::invalid_argument("signal trace: sample_period must be > 0");
        }
        for (std::size_t i = 0; i < reference_.size(); ++i) {
            if (!std::isfinite(reference_[i]) || !std::isfinite(response_[i])) {
                throw std::invalid_argument("signal trace: non-finite sample at index " + std::to_string(i));
            }
        }
    }

    std::span<const double> reference() const noexcept { return reference_; }
    std::span<const double> response() const noexcept { return response_; }
    double sample_period() const noexcept { return sample_period_; }
    std::size_t size() const noexcept { return reference_.size(); }
    double error(std::size_t i) const { return reference_[i] - response_[i]; }

    friend bool operator==(const SignalTrace&, const SignalTrace&) = default;

private:
    std::vector<double> reference_;
    std::vector<double> response_;
    double sample_period_;
};

enum class SegmentKind { active, zero };

struct Segment {
    std::size_t start = 0;
    std::size_t end = 0; // inclusive
    double level = 0.0;
    SegmentKind kind = SegmentKind::zero;

    std::size_t length() const noexcept { return end - start + 1; }
    friend bool operator==(const Segment&, const Segment&) = default;
};

struct Transition {
    std::size_t index = 0; // first sample at the new level
    double delta = 0.0;
    int sign = 0;
    friend bool operator==(const Transition&, const Transition&) = default;
};

// Transition k is followed by segments[k + 1].
struct SegmentMap {
    std::vector<Segment> segments;
    std::vector<Transition> transitions;
};

inline SegmentMap detect_segments(std::span<const double> reference, double zero_tolerance = kDefaultZeroTolerance)
{
    if (reference.empty()) {
        throw std::invalid_argument("detect_segments: empty reference");
    }
    SegmentMap map;
    const auto kind_of = [zero_tolerance](double level) {
        return std::abs(level) <= zero_tolerance ? SegmentKind::zero : SegmentKind::active;
    };
    std::size_t start = 0;
    for (std::size_t i = 1; i <= reference.size(); ++i) {
        if (i == reference.size() || reference[i] != reference[start]) {
            map.segments.push_back({start, i - 1, reference[start], kind_of(reference[start])});
            if (i < reference.size()) {
                const double delta = reference[i] - reference[start];
                map.transitions.push_back({i, delta, delta > 0.0 ? 1 : -1});
            }
            start = i;
        }
    }
    return map;
}

// Two-column CSV: a `# sample_period=<s>` line, the column header, then rows.
inline void write_trace_csv(std::ostream& out, const SignalTrace& trace)
{
    out << "# sample_period=" << std::setprecision(17) << trace.sample_period() << "\n";
    out << "reference,response\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out << trace.reference()[i] << ',' << trace.response()[i] << '\n';
    }
}

inline void write_trace_csv(const std::string& path, const SignalTrace& trace)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write trace file '" + path + "'");
    }
    write_trace_csv(out, trace);
}

inline SignalTrace read_trace_csv(std::istream& in)
{
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || line.rfind("# sample_period=", 0) != 0) {
        throw ParseError("expected '# sample_period=<seconds>'", lineno);
    }
    const double period = parse_double(line.substr(16), "sample_period");
    ++lineno;
    if (!std::getline(in, line) || trim(line) != "reference,response") {
        throw ParseError("expected header 'reference,response'", lineno);
    }
    std::vector<double> ref;
    std::vector<double> resp;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 2) {
            throw ParseError("expected two columns", lineno);
        }
        try {
            ref.push_back(parse_double(cols[0], "reference"));
            resp.push_back(parse_double(cols[1], "response"));
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return SignalTrace(std::move(ref), std::move(resp), period);
}

} // namespace commission
