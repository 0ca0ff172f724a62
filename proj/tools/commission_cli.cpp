// Command-line front end: tune, sweep, select, report, figures, validate.

#include "commission/commission.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace commission;

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> sampler;
    std::optional<std::size_t> budget;
    std::optional<std::string> strategy;
    std::optional<std::string> out;
};

std::pair<StudyConfig, SweepPlan> resolve(const GlobalOptions& g)
{
    KeyValueConfig cfg;
    if (!g.config.empty()) {
        cfg = KeyValueConfig::load(g.config);
    }
    auto [study, plan] = load_study_config(cfg);
    if (g.seed) {
        study.seed = *g.seed;
    }
    if (g.sampler) {
        study.sampler.kind = parse_sampler(*g.sampler);
        plan.samplers = {study.sampler.kind};
    }
    if (g.budget) {
        study.budget = *g.budget;
    }
    if (g.strategy) {
        study.strategy = *g.strategy;
    }
    if (g.out) {
        study.out_dir = *g.out;
    }
    if (study.out_dir.empty()) {
        study.out_dir = "out";
    }
    study.validate();
    return {study, plan};
}

void print_record(std::ostream& os, const std::string& label, const TrialRecord& r)
{
    os << label << ": trial " << r.trial_index << " kp=" << r.point.kp << " ki=" << r.point.ki << " iae=" << format_double(r.objectives.iae)
       << " itae=" << format_double(r.objectives.itae) << " os=" << format_double(r.objectives.os)
       << " osc=" << format_double(r.objectives.osc) << '\n';
}

void append_selection(const fs::path& out_dir, const std::string& study_id, const std::string& strategy, const TrialRecord& r,
                      bool fallback)
{
    fs::create_directories(out_dir);
    const auto path = out_dir / "selection.csv";
    const bool fresh = !fs::exists(path);
    std::ofstream f(path, std::ios::app);
    if (fresh) {
        f << "study_id,strategy,trial_index,kp,ki,iae,itae,os,osc,constraint_fallback\n";
    }
    f << study_id << ',' << strategy << ',' << r.trial_index << ',' << r.point.kp << ',' << r.point.ki << ','
      << format_double(r.objectives.iae) << ',' << format_double(r.objectives.itae) << ',' << format_double(r.objectives.os) << ','
      << format_double(r.objectives.osc) << ',' << (fallback ? 1 : 0) << '\n';
}

void write_report_files(const StudyReport& report, const fs::path& out_dir)
{
    fs::create_directories(out_dir);
    std::ofstream md(out_dir / "report.md");
    md << format_report(report);
    std::ofstream csv(out_dir / "report.csv");
    write_report_csv(csv, report);
}

SelectionWeights parse_weights(const std::string& text)
{
    const auto parts = split(text, ',');
    if (parts.size() != kObjectiveCount) {
        throw ConfigError("--weights needs four comma-separated values (iae,itae,os,osc)");
    }
    SelectionWeights w{parse_double(parts[0], "weights"), parse_double(parts[1], "weights"), parse_double(parts[2], "weights"),
                       parse_double(parts[3], "weights")};
    w.validate();
    return w;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Autonomous current-loop commissioning by multi-objective Bayesian optimization"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--config", g.config, "Key-value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Seed index");
    app.add_option("--sampler", g.sampler, "Sampler")->check(CLI::IsMember({"tpe", "gp", "random"}));
    app.add_option("--budget", g.budget, "Number of trials (N_total)");
    app.add_option("--strategy", g.strategy, "Selection strategy")->check(CLI::IsMember({"balanced", "fast", "smooth"}));
    app.add_option("--out", g.out, "Output directory");

    auto* tune = app.add_subcommand("tune", "Run one study on the simulated drive");

    auto* sweep = app.add_subcommand("sweep", "Run the sampler x budget x seed grid");
    unsigned threads = 0;
    sweep->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

    auto* select = app.add_subcommand("select", "Re-run controller selection on an existing trial log");
    std::string log_path;
    std::string weights_text;
    std::optional<double> max_os;
    std::optional<double> max_osc;
    select->add_option("--log", log_path, "Trial log file or directory")->required();
    select->add_option("--weights", weights_text, "Explicit weights iae,itae,os,osc (overrides --strategy)");
    select->add_option("--max-overshoot", max_os, "Upper bound on OS");
    select->add_option("--max-oscillation", max_osc, "Upper bound on OSC");

    auto* report = app.add_subcommand("report", "Aggregate trial logs into a results table");
    std::string logs_dir;
    report->add_option("--logs", logs_dir, "Directory of trial logs (default <out>/logs)");

    auto* figures = app.add_subcommand("figures", "Emit hypervolume and scatter plot data");
    figures->add_option("--logs", logs_dir, "Directory of trial logs (default <out>/logs)");

    auto* validate = app.add_subcommand("validate", "Re-run the selected gains on the validation profile");
    std::optional<std::int64_t> kp;
    std::optional<std::int64_t> ki;
    validate->add_option("--log", log_path, "Trial log of the study whose selection is validated");
    validate->add_option("--kp", kp, "Explicit Kp (with --ki, instead of --log)");
    validate->add_option("--ki", ki, "Explicit Ki");

    CLI11_PARSE(app, argc, argv);

    try {
        auto [config, plan] = resolve(g);
        const auto logs_location = [&] { return logs_dir.empty() ? config.out_dir / "logs" : fs::path(logs_dir); };

        if (tune->parsed()) {
            const auto result = run_study(config);
            std::cout << "study " << result.log.study_id << ": " << result.log.rows.size() << " trials, Pareto size "
                      << result.front.size() << "\n";
            print_record(std::cout, "selected (" + config.strategy + ")", result.selected);
            for (const auto& d : result.diagnostics) {
                std::cerr << "note: " << d << '\n';
            }
            append_selection(config.out_dir, result.log.study_id, config.strategy, result.selected, false);
            std::cout << "log: " << trial_log_path(config.out_dir, result.log.study_id).string() << '\n';
        } else if (sweep->parsed()) {
            const auto results = run_sweep(config, plan, threads);
            std::vector<TrialLog> logs;
            for (const auto& r : results) {
                logs.push_back(r.log);
            }
            const auto rep = aggregate(logs, plan.seeds, strategy_weights(config.strategy), config.sampler.startup_trials);
            write_report_files(rep, config.out_dir);
            emit_figures(rep, logs, config.out_dir / "figures");
            std::cout << results.size() << " studies\n" << format_report(rep);
        } else if (select->parsed()) {
            const auto weights = weights_text.empty() ? strategy_weights(config.strategy) : parse_weights(weights_text);
            SelectionConstraints c;
            c.max_overshoot = max_os;
            c.max_oscillation = max_osc;
            const std::string label = weights_text.empty() ? config.strategy : "custom";
            for (const auto& log : read_trial_logs(fs::path(log_path))) {
                const auto front = front_of(log.rows);
                if (front.empty()) {
                    std::cerr << log.study_id << ": no valid trials\n";
                    continue;
                }
                bool fallback = false;
                const auto chosen = select_controller(front, weights, c, &fallback);
                print_record(std::cout, log.study_id + " (" + label + (fallback ? ", constraint fallback" : "") + ")", chosen);
                append_selection(config.out_dir, log.study_id, label, chosen, fallback);
            }
        } else if (report->parsed()) {
            const auto logs = read_trial_logs(logs_location());
            const auto rep = aggregate(logs, plan.seeds, strategy_weights(config.strategy), config.sampler.startup_trials);
            write_report_files(rep, config.out_dir);
            std::cout << format_report(rep);
        } else if (figures->parsed()) {
            const auto logs = read_trial_logs(logs_location());
            const auto rep = aggregate(logs, plan.seeds, strategy_weights(config.strategy), config.sampler.startup_trials);
            for (const auto& p : emit_figures(rep, logs, config.out_dir / "figures")) {
                std::cout << p.string() << '\n';
            }
        } else if (validate->parsed()) {
            ParameterPoint gains;
            std::string id = "manual";
            if (kp && ki) {
                gains = {*kp, *ki};
            } else if (!log_path.empty()) {
                const auto logs = read_trial_logs(fs::path(log_path));
                if (logs.empty()) {
                    throw ConfigError("trial log is empty");
                }
                const auto chosen = select_from(front_of(logs.front().rows), config);
                gains = chosen.point;
                id = logs.front().study_id;
                config.budget = logs.front().budget;
                config.seed = logs.front().seed;
            } else {
                throw ConfigError("validate needs --log or both --kp and --ki");
            }
            const auto v = validate_controller(config, gains);
            std::cout << "validation of kp=" << gains.kp << " ki=" << gains.ki << ": " << (v.stable ? "stable" : "UNSTABLE")
                      << " iae=" << format_double(v.objectives.iae) << " itae=" << format_double(v.objectives.itae)
                      << " os=" << format_double(v.objectives.os) << " osc=" << format_double(v.objectives.osc) << '\n';
            fs::create_directories(config.out_dir);
            const auto trace_path = config.out_dir / ("validation_" + id + ".csv");
            write_trace_csv(trace_path.string(), *v.trace);
            std::cout << "trace: " << trace_path.string() << '\n';
            return v.stable ? 0 : 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
