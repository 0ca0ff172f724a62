#pragma once

// Study orchestration: configuration, crash-safe trial logs, replay, seed
// sweeps, per-cell aggregation and plot-data emission.

#include "commission/drive.hpp"
#include "commission/error.hpp"
#include "commission/kv_config.hpp"
#include "commission/pareto.hpp"
#include "commission/selection.hpp"
#include "commission/signals.hpp"
#include "commission/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace commission {

inline const std::vector<std::size_t> kDefaultBudgets{15, 20, 30, 50, 100};
inline constexpr std::size_t kDefaultSeedCount = 5;

struct StudyConfig {
    SamplerSettings sampler;
    std::size_t budget = 30;
    std::uint64_t seed = 0;        // seed index within a sweep
    std::uint64_t master_seed = 0;
    std::string profile_id = "tuning";
    ExcitationProfile tuning = tuning_profile();
    ExcitationProfile validation = validation_profile();
    PlantModel plant;
    SearchSpace space;
    std::string strategy = "balanced";
    SelectionConstraints constraints;
    std::filesystem::path out_dir;
    std::size_t max_retries = 2;

    std::string study_id() const
    {
        return std::string(to_string(sampler.kind)) + "-b" + std::to_string(budget) + "-s" + std::to_string(seed);
    }

    // The sampler is deliberately not part of the derivation: studies that
    // differ only in sampler share their startup trials and noise.
    std::uint64_t study_seed() const { return derive_seed(master_seed, budget, seed); }
    std::uint64_t noise_seed() const { return derive_seed(master_seed, budget, seed, fnv1a("noise")); }

    const ExcitationProfile& profile() const
    {
        if (profile_id == "tuning") {
            return tuning;
        }
        if (profile_id == "validation") {
            return validation;
        }
        throw ConfigError("unknown profile '" + profile_id + "' (valid: tuning, validation)");
    }

    void validate() const
    {
        if (budget < sampler.startup_trials) {
            throw ConfigError("budget (" + std::to_string(budget) + ") must be >= startup trials (" +
                              std::to_string(sampler.startup_trials) + ")");
        }
        space.validate();
        plant.validate();
        sampler.tpe.validate();
        constraints.validate();
        strategy_weights(strategy);
        (void)profile();
    }
};

struct SweepPlan {
    std::vector<std::size_t> budgets = kDefaultBudgets;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::vector<SamplerKind> samplers{SamplerKind::tpe, SamplerKind::gp, SamplerKind::random};
};

namespace detail {

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& text, Parse parse)
{
    std::vector<T> out;
    for (const auto& item : split(text, ',')) {
        if (!item.empty()) {
            out.push_back(parse(item));
        }
    }
    return out;
}

} // namespace detail

// Reads a main configuration file. Unknown keys are rejected.
inline std::pair<StudyConfig, SweepPlan> load_study_config(const KeyValueConfig& cfg, StudyConfig c = {}, SweepPlan plan = {})
{
    if (const auto rng = cfg.get("rng"); rng && *rng != kRngAlgorithm) {
        throw ConfigError("unsupported rng '" + *rng + "' (only " + std::string(kRngAlgorithm) + ")");
    }
    if (const auto s = cfg.get("sampler")) {
        c.sampler.kind = parse_sampler(*s);
    }
    c.budget = static_cast<std::size_t>(cfg.get_int_or("budget", static_cast<std::int64_t>(c.budget)));
    c.seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", static_cast<std::int64_t>(c.seed)));
    c.master_seed = static_cast<std::uint64_t>(cfg.get_int_or("master_seed", static_cast<std::int64_t>(c.master_seed)));
    c.sampler.startup_trials =
        static_cast<std::size_t>(cfg.get_int_or("startup_trials", static_cast<std::int64_t>(c.sampler.startup_trials)));
    c.sampler.tpe.gamma_fraction = cfg.get_double_or("tpe.gamma_fraction", c.sampler.tpe.gamma_fraction);
    c.sampler.tpe.candidate_count =
        static_cast<std::size_t>(cfg.get_int_or("tpe.candidate_count", static_cast<std::int64_t>(c.sampler.tpe.candidate_count)));
    c.sampler.tpe.prior_weight = cfg.get_double_or("tpe.prior_weight", c.sampler.tpe.prior_weight);
    c.sampler.tpe.bandwidth_floor = cfg.get_double_or("tpe.bandwidth_floor", c.sampler.tpe.bandwidth_floor);
    c.sampler.tpe.bandwidth_scale = cfg.get_double_or("tpe.bandwidth_scale", c.sampler.tpe.bandwidth_scale);
    c.sampler.gp.pool_size = static_cast<std::size_t>(cfg.get_int_or("gp.pool_size", static_cast<std::int64_t>(c.sampler.gp.pool_size)));
    c.profile_id = cfg.get_or("profile", c.profile_id);
    c.tuning = profile_from_config(cfg, "tuning", c.tuning);
    c.validation = profile_from_config(cfg, "validation", c.validation);
    c.plant = PlantModel::from_config(cfg, c.plant);
    c.space = SearchSpace::make(cfg.get_int_or("space.kp_min", c.space.ranges[0].lower), cfg.get_int_or("space.kp_max", c.space.ranges[0].upper),
                                cfg.get_int_or("space.ki_min", c.space.ranges[1].lower), cfg.get_int_or("space.ki_max", c.space.ranges[1].upper));
    c.strategy = cfg.get_or("strategy", c.strategy);
    if (cfg.has("selection.max_overshoot")) {
        c.constraints.max_overshoot = cfg.get_double_or("selection.max_overshoot", 0.0);
    }
    if (cfg.has("selection.max_oscillation")) {
        c.constraints.max_oscillation = cfg.get_double_or("selection.max_oscillation", 0.0);
    }
    if (const auto out = cfg.get("out")) {
        c.out_dir = *out;
    }
    if (const auto b = cfg.get("sweep.budgets")) {
        plan.budgets = detail::parse_list<std::size_t>(*b, [](const std::string& s) { return static_cast<std::size_t>(parse_int(s, "sweep.budgets")); });
    }
    if (const auto s = cfg.get("sweep.seeds")) {
        plan.seeds = detail::parse_list<std::uint64_t>(*s, [](const std::string& v) { return static_cast<std::uint64_t>(parse_int(v, "sweep.seeds")); });
    }
    if (const auto s = cfg.get("sweep.samplers")) {
        plan.samplers = detail::parse_list<SamplerKind>(*s, [](const std::string& v) { return parse_sampler(v); });
    }
    if (const auto unused = cfg.unused_keys(); !unused.empty()) {
        throw ParseError("unknown configuration key '" + unused.front() + "'", cfg.line_of(unused.front()));
    }
    c.validate();
    return {c, plan};
}

// --- trial log -----------------------------------------------------------

inline constexpr const char* kTrialLogHeader =
    "study_id,sampler,budget,seed,trial_index,phase,kp,ki,iae,itae,os,osc,stable,duration_ms";

struct TrialLog {
    std::string study_id;
    SamplerKind sampler = SamplerKind::tpe;
    std::size_t budget = 0;
    std::uint64_t seed = 0;
    std::vector<TrialRecord> rows;
};

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string trial_log_row(const TrialLog& log, const TrialRecord& r)
{
    std::ostringstream os;
    os << log.study_id << ',' << to_string(log.sampler) << ',' << log.budget << ',' << log.seed << ',' << r.trial_index << ','
       << to_string(r.phase) << ',' << r.point.kp << ',' << r.point.ki << ',' << format_double(r.objectives.iae) << ','
       << format_double(r.objectives.itae) << ',' << format_double(r.objectives.os) << ',' << format_double(r.objectives.osc)
       << ',' << (r.stable ? 1 : 0) << ',' << format_double(r.duration_ms);
    return os.str();
}

inline void write_trial_log(std::ostream& out, const TrialLog& log, bool header = true)
{
    if (header) {
        out << kTrialLogHeader << '\n';
    }
    for (const auto& r : log.rows) {
        out << trial_log_row(log, r) << '\n';
    }
}

// Reads one or more studies from a log stream, grouped by study_id in order
// of first appearance.
inline std::vector<TrialLog> read_trial_logs(std::istream& in)
{
    std::vector<TrialLog> logs;
    std::map<std::string, std::size_t> index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        if (trim(line) == kTrialLogHeader) {
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 14) {
            throw ParseError("trial log rows have 14 columns", lineno);
        }
        try {
            auto [it, inserted] = index.emplace(cols[0], logs.size());
            if (inserted) {
                TrialLog log;
                log.study_id = cols[0];
                log.sampler = parse_sampler(cols[1]);
                log.budget = static_cast<std::size_t>(parse_int(cols[2], "budget"));
                log.seed = static_cast<std::uint64_t>(parse_int(cols[3], "seed"));
                logs.push_back(std::move(log));
            }
            TrialRecord r;
            r.trial_index = static_cast<std::size_t>(parse_int(cols[4], "trial_index"));
            if (cols[5] != "startup" && cols[5] != "model") {
                throw ConfigError("phase must be startup or model");
            }
            r.phase = cols[5] == "startup" ? TrialPhase::startup : TrialPhase::model;
            r.point = {parse_int(cols[6], "kp"), parse_int(cols[7], "ki")};
            r.objectives = {parse_double(cols[8], "iae"), parse_double(cols[9], "itae"), parse_double(cols[10], "os"),
                            parse_double(cols[11], "osc")};
            r.stable = parse_int(cols[12], "stable") != 0;
            r.duration_ms = parse_double(cols[13], "duration_ms");
            auto& log = logs[it->second];
            if (r.trial_index != log.rows.size()) {
                throw ConfigError("trial indices must be dense and ordered");
            }
            log.rows.push_back(std::move(r));
        } catch (const ParseError&) {
            throw;
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return logs;
}

inline std::vector<TrialLog> read_trial_logs(const std::filesystem::path& path)
{
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(path)) {
        for (const auto& entry : std::filesystem::recursive_directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv" && entry.path().filename().string().rfind("trials_", 0) == 0) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    std::vector<TrialLog> out;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) {
            throw ConfigError("cannot open trial log '" + f.string() + "'");
        }
        auto logs = read_trial_logs(in);
        out.insert(out.end(), std::make_move_iterator(logs.begin()), std::make_move_iterator(logs.end()));
    }
    return out;
}

inline std::filesystem::path trial_log_path(const std::filesystem::path& out_dir, const std::string& study_id)
{
    return out_dir / "logs" / ("trials_" + study_id + ".csv");
}

inline ParetoFront front_of(std::span<const TrialRecord> rows)
{
    ParetoFront f;
    for (const auto& r : rows) {
        f.insert(r);
    }
    return f;
}

// --- studies -------------------------------------------------------------

struct StudyResult {
    TrialLog log;
    ParetoFront front;
    TrialRecord selected;
    std::uint64_t fingerprint = 0;
    std::vector<std::string> diagnostics;
};

inline TrialRecord select_from(const ParetoFront& front, const StudyConfig& config)
{
    return select_controller(front, strategy_weights(config.strategy), config.constraints);
}

// ask -> run_trial -> tell for `budget` trials. Rows are flushed as they are
// produced when an output directory is configured.
inline StudyResult run_study(const StudyConfig& config, DriveInterface* drive = nullptr)
{
    config.validate();
    std::unique_ptr<SimulatedDrive> owned;
    if (drive == nullptr) {
        owned = std::make_unique<SimulatedDrive>(config.plant, config.noise_seed(), config.space);
        drive = owned.get();
    }
    Study study(config.space, config.sampler, config.study_seed());
    TrialLog log{config.study_id(), config.sampler.kind, config.budget, config.seed, {}};

    std::ofstream sink;
    if (!config.out_dir.empty()) {
        const auto path = trial_log_path(config.out_dir, log.study_id);
        std::filesystem::create_directories(path.parent_path());
        sink.open(path, std::ios::trunc);
        if (!sink) {
            throw std::runtime_error("cannot write trial log '" + path.string() + "'");
        }
        sink << kTrialLogHeader << '\n' << std::flush;
    }

    const auto& profile = config.profile();
    for (std::size_t t = 0; t < config.budget; ++t) {
        const auto point = study.ask();
        std::optional<TrialRecord> rec;
        for (std::size_t attempt = 0; !rec; ++attempt) {
            try {
                rec = run_trial(*drive, point, profile);
            } catch (const TrialError&) {
                if (attempt >= config.max_retries) {
                    throw;
                }
            }
        }
        const auto& told = study.tell(std::move(*rec));
        log.rows.push_back(told);
        if (sink.is_open()) {
            sink << trial_log_row(log, told) << '\n' << std::flush;
        }
    }

    StudyResult result;
    result.front = study.front();
    result.selected = select_from(study.front(), config);
    result.fingerprint = study.fingerprint();
    result.diagnostics = study.diagnostics();
    result.log = std::move(log);
    return result;
}

class ReplayMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rebuilds a study from its log. Each logged point must equal what the
// sampler proposes given the same seed and history.
inline Study replay_study(const StudyConfig& config, const TrialLog& log)
{
    Study study(config.space, config.sampler, config.study_seed());
    for (const auto& row : log.rows) {
        const auto proposed = study.ask();
        if (proposed != row.point) {
            throw ReplayMismatch("trial " + std::to_string(row.trial_index) + ": sampler proposed (" + std::to_string(proposed.kp) + ", " +
                                 std::to_string(proposed.ki) + ") but the log has (" + std::to_string(row.point.kp) + ", " +
                                 std::to_string(row.point.ki) + ")");
        }
        study.tell(row);
    }
    return study;
}

inline StudyConfig config_for(const StudyConfig& base, SamplerKind sampler, std::size_t budget, std::uint64_t seed)
{
    StudyConfig c = base;
    c.sampler.kind = sampler;
    c.budget = budget;
    c.seed = seed;
    return c;
}

// Runs every (sampler, budget, seed) cell. Studies are independent and are
// spread over `threads` workers; results come back in plan order.
inline std::vector<StudyResult> run_sweep(const StudyConfig& base, const SweepPlan& plan, unsigned threads = 0)
{
    std::vector<StudyConfig> configs;
    for (const auto s : plan.samplers) {
        for (const auto b : plan.budgets) {
            for (const auto seed : plan.seeds) {
                configs.push_back(config_for(base, s, b, seed));
            }
        }
    }
    std::vector<StudyResult> results(configs.size());
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(configs.size(), 1)));
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                results[i] = run_study(configs[i]);
            } catch (...) {
                const std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return results;
}

// --- aggregation ---------------------------------------------------------

struct MeanStd {
    double mean = 0.0;
    double std = 0.0; // sample standard deviation; 0 for a single value
};

inline MeanStd mean_std(std::span<const double> v)
{
    MeanStd out;
    if (v.empty()) {
        return out;
    }
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (const double x : v) {
            ss += (x - out.mean) * (x - out.mean);
        }
        out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return out;
}

inline constexpr std::size_t kReportColumns = kObjectiveCount + 1; // four metrics and Pareto size

struct ReportCell {
    SamplerKind sampler = SamplerKind::tpe;
    std::size_t budget = 0;
    std::vector<std::uint64_t> seeds;
    std::array<MeanStd, kReportColumns> stats{};
    std::array<bool, kReportColumns> best{};
    bool incomplete = false;
};

struct StudySummary {
    std::string study_id;
    SamplerKind sampler = SamplerKind::tpe;
    std::size_t budget = 0;
    std::uint64_t seed = 0;
    TrialRecord selected;
    std::size_t pareto_size = 0;
    std::vector<double> hypervolume;
};

struct StudyReport {
    std::vector<ReportCell> cells;
    std::vector<StudySummary> studies;
    NormalizationBounds bounds;
    std::size_t clamped = 0;
    std::size_t startup_trials = kDefaultStartupTrials;
};

// Pure function of the logs: selection, Pareto sizes, globally normalized
// hypervolume traces and the per-budget best marks. Minimum mean is best for
// the four metrics; the largest mean Pareto size is best.
inline StudyReport aggregate(std::span<const TrialLog> logs, std::span<const std::uint64_t> expected_seeds,
                             const SelectionWeights& weights = strategy_weights("balanced"),
                             std::size_t startup_trials = kDefaultStartupTrials)
{
    StudyReport report;
    report.startup_trials = startup_trials;
    for (const auto& log : logs) {
        for (const auto& r : log.rows) {
            if (r.valid()) {
                report.bounds.include(r.objectives.as_array());
            }
        }
    }
    std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> groups;
    for (const auto& log : logs) {
        StudySummary s;
        s.study_id = log.study_id;
        s.sampler = log.sampler;
        s.budget = log.budget;
        s.seed = log.seed;
        const auto front = front_of(log.rows);
        s.pareto_size = front.size();
        if (!front.empty()) {
            s.selected = select_controller(front, weights);
        }
        s.hypervolume = hypervolume_trace(log.rows, report.bounds, {}, &report.clamped);
        groups[{static_cast<int>(log.sampler), log.budget}].push_back(report.studies.size());
        report.studies.push_back(std::move(s));
    }
    const std::set<std::uint64_t> expected(expected_seeds.begin(), expected_seeds.end());
    for (const auto& [key, members] : groups) {
        ReportCell cell;
        cell.sampler = static_cast<SamplerKind>(key.first);
        cell.budget = key.second;
        std::array<std::vector<double>, kReportColumns> columns;
        std::set<std::uint64_t> present;
        for (const auto i : members) {
            const auto& s = report.studies[i];
            cell.seeds.push_back(s.seed);
            present.insert(s.seed);
            const auto v = s.selected.objectives.as_array();
            for (std::size_t m = 0; m < kObjectiveCount; ++m) {
                columns[m].push_back(v[m]);
            }
            columns[kObjectiveCount].push_back(static_cast<double>(s.pareto_size));
        }
        for (std::size_t c = 0; c < kReportColumns; ++c) {
            cell.stats[c] = mean_std(columns[c]);
        }
        cell.incomplete = !std::includes(present.begin(), present.end(), expected.begin(), expected.end());
        report.cells.push_back(cell);
    }
    std::set<std::size_t> budgets;
    for (const auto& c : report.cells) {
        budgets.insert(c.budget);
    }
    for (const auto b : budgets) {
        for (std::size_t col = 0; col < kReportColumns; ++col) {
            const bool larger_is_better = col == kObjectiveCount;
            std::optional<double> best;
            for (const auto& c : report.cells) {
                if (c.budget != b || c.incomplete) {
                    continue;
                }
                const double v = c.stats[col].mean;
                if (!best || (larger_is_better ? v > *best : v < *best)) {
                    best = v;
                }
            }
            for (auto& c : report.cells) {
                if (c.budget == b) {
                    c.best[col] = best && !c.incomplete && c.stats[col].mean == *best;
                }
            }
        }
    }
    return report;
}

inline std::string format_report(const StudyReport& report)
{
    std::ostringstream os;
    os << "| Method | Trials | IAE | ITAE | OS | OSC | Pareto size |\n";
    os << "|---|---|---|---|---|---|---|\n";
    auto cells = report.cells;
    std::sort(cells.begin(), cells.end(), [](const ReportCell& a, const ReportCell& b) {
        return std::tie(a.budget, a.sampler) < std::tie(b.budget, b.sampler);
    });
    char buf[96];
    for (const auto& c : cells) {
        os << "| " << to_string(c.sampler) << (c.incomplete ? " (incomplete)" : "") << " | " << c.budget;
        for (std::size_t col = 0; col < kReportColumns; ++col) {
            std::snprintf(buf, sizeof buf, "%.4g +- %.2g", c.stats[col].mean, c.stats[col].std);
            os << " | " << (c.best[col] ? "**" : "") << buf << (c.best[col] ? "**" : "");
        }
        os << " |\n";
    }
    return os.str();
}

inline void write_report_csv(std::ostream& out, const StudyReport& report)
{
    out << "sampler,budget,seeds,incomplete";
    for (const char* name : {"iae", "itae", "os", "osc", "pareto_size"}) {
        out << ',' << name << "_mean," << name << "_std," << name << "_best";
    }
    out << '\n';
    for (const auto& c : report.cells) {
        out << to_string(c.sampler) << ',' << c.budget << ',' << c.seeds.size() << ',' << (c.incomplete ? 1 : 0);
        for (std::size_t col = 0; col < kReportColumns; ++col) {
            out << ',' << format_double(c.stats[col].mean) << ',' << format_double(c.stats[col].std) << ',' << (c.best[col] ? 1 : 0);
        }
        out << '\n';
    }
}

// --- figure data ---------------------------------------------------------

// Indices of the `k` smallest values (ties by position).
inline std::vector<bool> top_k_flags(std::span<const double> values, std::size_t k)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<bool> flags(values.size(), false);
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
        flags[order[i]] = true;
    }
    return flags;
}

inline void write_scatter_csv(std::ostream& out, const TrialLog& log)
{
    out << "trial_index,kp,ki,iae,itae,os,osc,is_pareto,top5_iae,top5_itae,top5_os,top5_osc\n";
    const auto front = front_of(log.rows);
    std::array<std::vector<bool>, kObjectiveCount> top;
    for (std::size_t m = 0; m < kObjectiveCount; ++m) {
        std::vector<double> v;
        for (const auto& r : log.rows) {
            v.push_back(std::isfinite(r.objectives[m]) ? r.objectives[m] : std::numeric_limits<double>::max());
        }
        top[m] = top_k_flags(v, 5);
    }
    for (std::size_t i = 0; i < log.rows.size(); ++i) {
        const auto& r = log.rows[i];
        out << r.trial_index << ',' << r.point.kp << ',' << r.point.ki << ',' << format_double(r.objectives.iae) << ','
            << format_double(r.objectives.itae) << ',' << format_double(r.objectives.os) << ',' << format_double(r.objectives.osc)
            << ',' << (front.contains_trial(r.trial_index) ? 1 : 0);
        for (std::size_t m = 0; m < kObjectiveCount; ++m) {
            out << ',' << (top[m][i] ? 1 : 0);
        }
        out << '\n';
    }
}

// Mean/std hypervolume per trial index per sampler, over the studies at that
// sampler's largest budget.
inline void write_hypervolume_csv(std::ostream& out, const StudyReport& report)
{
    out << "sampler,trial_index,hv_mean,hv_std,seeds,startup_end\n";
    std::map<int, std::size_t> max_budget;
    for (const auto& s : report.studies) {
        auto& b = max_budget[static_cast<int>(s.sampler)];
        b = std::max(b, s.budget);
    }
    for (const auto& [sampler, budget] : max_budget) {
        std::vector<const StudySummary*> group;
        for (const auto& s : report.studies) {
            if (static_cast<int>(s.sampler) == sampler && s.budget == budget) {
                group.push_back(&s);
            }
        }
        for (std::size_t t = 0; t < budget; ++t) {
            std::vector<double> v;
            for (const auto* s : group) {
                if (t < s->hypervolume.size()) {
                    v.push_back(s->hypervolume[t]);
                }
            }
            const auto ms = mean_std(v);
            out << to_string(static_cast<SamplerKind>(sampler)) << ',' << t << ',' << format_double(ms.mean) << ','
                << format_double(ms.std) << ',' << v.size() << ',' << (t == report.startup_trials ? 1 : 0) << '\n';
        }
    }
}

inline std::vector<std::filesystem::path> emit_figures(const StudyReport& report, std::span<const TrialLog> logs,
                                                       const std::filesystem::path& out_dir)
{
    std::vector<std::filesystem::path> written;
    std::filesystem::create_directories(out_dir);
    const auto open = [&](const std::filesystem::path& p) {
        std::ofstream f(p);
        if (!f) {
            throw std::runtime_error("cannot write '" + p.string() + "'");
        }
        written.push_back(p);
        return f;
    };
    {
        auto f = open(out_dir / "hypervolume.csv");
        write_hypervolume_csv(f, report);
    }
    for (const auto& log : logs) {
        auto f = open(out_dir / ("scatter_" + log.study_id + ".csv"));
        write_scatter_csv(f, log);
    }
    return written;
}

// --- validation ----------------------------------------------------------

struct ValidationResult {
    ParameterPoint gains;
    ObjectiveVector objectives;
    bool stable = true;
    std::optional<SignalTrace> trace;
};

inline ValidationResult validate_controller(const StudyConfig& config, const ParameterPoint& gains)
{
    SimulatedDrive drive(config.plant, derive_seed(config.master_seed, config.budget, config.seed, fnv1a("validate")), config.space);
    ValidationResult out;
    out.gains = gains;
    const auto rec = run_trial(drive, gains, config.validation, &out.trace);
    out.objectives = rec.objectives;
    out.stable = rec.stable;
    return out;
}

} // namespace commission
