// qlidar: command-line front end for the Gaussian-modulated quantum-secured
// LiDAR simulator.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include "qlidar/harness.hpp"
#include "qlidar/io.hpp"
#include "qlidar/sweep.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct CommonFlags {
    std::string config_path;
    std::string scenario = "honest";
    std::size_t trials = 1000;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    unsigned parallel = 0;
    bool verbose = false;
    std::string noise_floor = "empirical";
    std::optional<double> security_pfa;
};

qlidar::ProtocolConfig load(const CommonFlags& f) {
    auto config = f.config_path.empty() ? qlidar::ProtocolConfig::paper_defaults()
                                        : qlidar::load_config(f.config_path);
    if (f.seed) config.rng_seed = *f.seed;
    qlidar::validate_config(config);
    if (f.security_pfa)
        config.excess_noise_threshold =
            qlidar::excess_threshold_for_false_alarm(config, *f.security_pfa);
    return config;
}

qlidar::RunOptions options(const CommonFlags& f) {
    qlidar::RunOptions o;
    o.verbose = f.verbose;
    o.parallel = f.parallel;
    if (f.noise_floor == "analytic")
        o.noise_floor = qlidar::NoiseFloorSource::analytic;
    else if (f.noise_floor != "empirical")
        throw qlidar::ConfigError({"--noise-floor must be empirical or analytic"});
    return o;
}

void add_config_flags(CLI::App& cmd, CommonFlags& f) {
    cmd.add_option("--config", f.config_path, "key = value config file");
    cmd.add_option("--seed", f.seed, "override rng_seed");
}

void add_run_flags(CLI::App& cmd, CommonFlags& f) {
    add_config_flags(cmd, f);
    cmd.add_option("--out", f.out, "output directory")->capture_default_str();
    cmd.add_flag("--verbose", f.verbose, "keep and dump intermediate artifacts");
    cmd.add_option("--noise-floor", f.noise_floor, "empirical|analytic")->capture_default_str();
    cmd.add_option("--security-pfa", f.security_pfa,
                   "set excess_noise_threshold from an analytic false-alarm target");
}

int cmd_validate(const CommonFlags& f) {
    const auto config = load(f);
    std::cout << "valid\n" << qlidar::format_config(config);
    return 0;
}

int cmd_run(const CommonFlags& f) {
    const auto config = load(f);
    const auto scenario = qlidar::scenario_from_string(f.scenario);
    auto opts = options(f);
    opts.verbose = true;
    auto result = qlidar::run_scenario(config, scenario, opts);

    qlidar::ResultBundle bundle;
    bundle.config = config;
    bundle.roc = qlidar::analytic_roc_records(config);
    bundle.profile = result.artifacts->profile;
    bundle.reports.push_back(qlidar::summarize(scenario, {result}));
    if (f.verbose) {
        qlidar::OutputDirectory dir(f.out);
        dir.write("frame.csv", qlidar::frame_csv(result.artifacts->frame, result.artifacts->receive));
    }
    result.artifacts.reset();
    bundle.results.push_back(std::move(result));
    qlidar::emit_results(bundle, f.out);

    const auto& r = bundle.results.front();
    std::cout << "detected=" << r.ranging.detected << " delay=" << r.ranging.estimated_delay
              << " c_max=" << r.profile_summary.c_max << " threshold=" << r.ranging.threshold_used;
    if (r.estimate)
        std::cout << " v_eps_hat=" << r.estimate->v_eps_hat
                  << " spoof_detected=" << r.security->spoof_detected;
    std::cout << "\n";
    return 0;
}

int cmd_ensemble(const CommonFlags& f) {
    const auto config = load(f);
    const auto opts = options(f);
    qlidar::ResultBundle bundle;
    bundle.config = config;
    bundle.roc = qlidar::analytic_roc_records(config);

    std::vector<qlidar::Scenario> scenarios;
    if (f.scenario == "both")
        scenarios = {qlidar::Scenario::honest, qlidar::Scenario::spoofed};
    else
        scenarios = {qlidar::scenario_from_string(f.scenario)};

    std::vector<std::vector<qlidar::ScenarioResult>> per_scenario;
    for (auto s : scenarios) {
        auto run = qlidar::run_ensemble(config, s, f.trials, opts);
        std::cout << qlidar::summary_text(run.report) << "\n";
        bundle.reports.push_back(run.report);
        bundle.results.insert(bundle.results.end(), run.results.begin(), run.results.end());
        per_scenario.push_back(std::move(run.results));
    }
    if (per_scenario.size() == 2) {
        std::vector<double> thresholds;
        for (const auto& rec : bundle.roc)
            if (rec.scenario == "security") thresholds.push_back(rec.threshold);
        const auto mc = qlidar::empirical_security_roc(per_scenario[0], per_scenario[1], thresholds);
        bundle.roc.insert(bundle.roc.end(), mc.begin(), mc.end());
    }
    qlidar::emit_results(bundle, f.out);
    return 0;
}

struct SweepFlags {
    std::string variable = "gain";
    std::string formula = "snr_ratio";
    double from = 0.01;
    double to = 1.0;
    std::size_t points = 200;
    std::string series = "sweep";
};

int cmd_sweep(const CommonFlags& f, const SweepFlags& s) {
    qlidar::SweepSpec spec;
    spec.fixed = load(f);
    spec.variable = qlidar::sweep_variable_from_string(s.variable);
    spec.grid = qlidar::linear_grid(s.from, s.to, s.points);
    spec.series = s.series;
    const auto table = qlidar::sweep(spec, qlidar::sweep_formula_from_string(s.formula));
    for (const auto& e : table.errors) std::cerr << "warning: " << e << "\n";
    qlidar::ResultBundle bundle;
    bundle.table = table;
    qlidar::emit_results(bundle, f.out);
    return 0;
}

int cmd_figure(const CommonFlags& f, int figure) {
    qlidar::ResultBundle bundle;
    bundle.table = qlidar::figure_table(figure);
    qlidar::emit_results(bundle, f.out);
    std::cout << "fig" << figure << ": " << bundle.table->rows.size() << " rows -> "
              << f.out << "/table.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-secured LiDAR simulator"};
    app.require_subcommand(1);
    CommonFlags flags;
    SweepFlags sweep_flags;

    auto* validate = app.add_subcommand("validate", "check a config file");
    add_config_flags(*validate, flags);

    auto* run = app.add_subcommand("run", "run the protocol once");
    add_run_flags(*run, flags);
    run->add_option("--scenario", flags.scenario, "honest|spoofed")->capture_default_str();

    auto* ensemble = app.add_subcommand("ensemble", "seeded Monte Carlo ensemble");
    add_run_flags(*ensemble, flags);
    ensemble->add_option("--scenario", flags.scenario, "honest|spoofed|both")->capture_default_str();
    ensemble->add_option("--trials", flags.trials, "number of trials")->capture_default_str();
    ensemble->add_option("--parallel", flags.parallel, "worker threads (0 = all cores)");

    auto* sweep = app.add_subcommand("sweep", "closed-form parameter sweep");
    add_config_flags(*sweep, flags);
    sweep->add_option("--out", flags.out, "output directory")->capture_default_str();
    sweep->add_option("--variable", sweep_flags.variable,
                      "gain|transmittance|snr|phase_drift|length_L|pulses_M|threshold");
    sweep->add_option("--formula", sweep_flags.formula,
                      "snr_honest|snr_ratio|target_pd|target_roc|security_roc");
    sweep->add_option("--from", sweep_flags.from);
    sweep->add_option("--to", sweep_flags.to);
    sweep->add_option("--points", sweep_flags.points)->capture_default_str();
    sweep->add_option("--series", sweep_flags.series);

    std::vector<CLI::App*> figures;
    for (int n = 2; n <= 9; ++n) {
        auto* fig = app.add_subcommand("fig" + std::to_string(n),
                                       "data for figure " + std::to_string(n));
        fig->add_option("--out", flags.out, "output directory")->capture_default_str();
        figures.push_back(fig);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        if (*validate) return cmd_validate(flags);
        if (*run) return cmd_run(flags);
        if (*ensemble) return cmd_ensemble(flags);
        if (*sweep) return cmd_sweep(flags, sweep_flags);
        for (std::size_t i = 0; i < figures.size(); ++i)
            if (*figures[i]) return cmd_figure(flags, static_cast<int>(i) + 2);
    } catch (const qlidar::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kRuntimeError;
}
