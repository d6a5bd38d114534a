#include "qlidar/harness.hpp"

#include "qlidar/analytics.hpp"
#include "qlidar/sweep.hpp"

#include <atomic>
#include <cmath>
#include <algorithm>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace qlidar {

ScenarioError::ScenarioError(std::string step, const std::string& what)
    : std::runtime_error(step + ": " + what), step_(std::move(step)) {}

namespace {

template <typename F>
auto at_step(const char* step, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ScenarioError&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScenarioError(step, e.what());
    }
}

TrialScore score_trial(const CorrelationProfile& profile, const RangingVerdict& verdict,
                       const ProtocolConfig& config) {
    TrialScore s;
    const auto model = target_model(config);
    s.analytic_threshold = config.correlation_threshold_sigma * std::sqrt(model.var_floor);
    const std::size_t truth = config.true_delay;
    const double th = s.analytic_threshold;

    if (truth < profile.size()) {
        s.aligned_statistic = std::abs(model.dominant == 1 ? profile.c1[truth] : profile.c2[truth]);
        s.aligned_detection = s.aligned_statistic > 0.0 && s.aligned_statistic >= th;
    }
    s.delay_match = verdict.estimated_delay == truth;
    s.delay_correct = verdict.detected && s.delay_match;

    const std::size_t span_end = config.true_delay + config.frame_length;  // exclusive
    for (std::size_t d = 0; d < profile.size(); ++d) {
        if (d == truth) continue;
        const double a = profile.c1[d];
        const double b = profile.c2[d];
        if (std::max(std::abs(a), std::abs(b)) >= th && th > 0.0) s.profile_false_alarm = true;
        if (d >= config.true_delay && d + profile.ranging_length <= span_end) {
            s.lag_evaluations += 2;
            s.lag_false_alarms += (a > th) + (b > th);
        }
    }
    return s;
}

}  // namespace

ScenarioResult run_scenario(const ProtocolConfig& config, Scenario scenario,
                            const RunOptions& options, std::uint64_t trial) {
    validate_config(config);
    ScenarioResult result;
    result.scenario = scenario;
    result.seed = config.rng_seed;
    result.trial = trial;
    result.aligned_phase = std::numeric_limits<double>::quiet_NaN();

    RandomStream stream = RandomStream(config.rng_seed).substream(trial);

    // (1)-(2) random numbers and state preparation
    auto frame = at_step("modulate", [&] { return modulate(config, stream); });
    // (3) echo and randomized homodyne detection
    auto receive = at_step("channel", [&] {
        return roundtrip(scenario, frame, config, stream, options.channel_mode);
    });
    // (4) ranging
    auto profile = at_step("ranging", [&] {
        return moving_cross_correlation(frame, receive, config.ranging_length, options.correlation);
    });
    result.ranging = at_step("detection", [&] {
        return detect_target(profile, config, options.noise_floor);
    });
    result.profile_summary = {profile.peak_lag, profile.c_max, std::sqrt(result.ranging.noise_floor)};
    result.score = score_trial(profile, result.ranging, config);

    std::optional<TransmitFrame> compensated;
    if (result.ranging.detected) {
        // Align the whole frame at the detected delay and re-estimate the
        // drift from all aligned samples before compensating.
        const std::size_t delay = result.ranging.estimated_delay;
        const std::size_t n =
            std::min(frame.size(), receive.measurements.size() - delay);
        const auto [c1, c2] = at_step("alignment", [&] {
            return correlate_at_lag(frame, receive, n, delay);
        });
        if (c1 != 0.0 || c2 != 0.0) {
            result.aligned_phase = estimate_phase(c1, c2);
            compensated = compensate_phase(frame, result.aligned_phase);
            result.estimate = at_step("estimation", [&] {
                TransmitFrame head = *compensated;
                head.x.resize(n);
                head.p.resize(n);
                const auto seq = build_sequences(
                    head, std::span(frame.basis).subspan(delay, n));
                return estimate_parameters(
                    seq.t1, std::span(receive.measurements).subspan(delay, n), config);
            });
            result.security = at_step("security", [&] {
                return security_decide(*result.estimate, config);
            });
        }
    }

    if (options.verbose)
        result.artifacts = ScenarioArtifacts{std::move(frame), std::move(receive),
                                             std::move(profile), std::move(compensated)};
    return result;
}

double Rate::value() const noexcept {
    return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
}

double Rate::half_width(double z) const noexcept {
    if (!trials) return 0.0;
    const double p = value();
    return z * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& std_dev) {
    mean = 0.0;
    std_dev = 0.0;
    if (v.empty()) return;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    std_dev = std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

EnsembleReport summarize(Scenario scenario, const std::vector<ScenarioResult>& results) {
    EnsembleReport r;
    r.scenario = scenario;
    r.trials = results.size();
    std::vector<double> v_eps, sqrt_eta;
    for (const auto& res : results) {
        const auto& s = res.score;
        r.empirical_p_d.trials += 1;
        r.empirical_p_d.hits += s.aligned_detection;
        r.empirical_p_fa.trials += s.lag_evaluations;
        r.empirical_p_fa.hits += s.lag_false_alarms;
        r.profile_p_fa.trials += 1;
        r.profile_p_fa.hits += s.profile_false_alarm;
        r.ranging_detected.trials += 1;
        r.ranging_detected.hits += res.ranging.detected;
        r.delay_accuracy.trials += 1;
        r.delay_accuracy.hits += s.delay_match;
        if (res.security) {
            r.spoof_alarm.trials += 1;
            r.spoof_alarm.hits += res.security->spoof_detected;
        }
        if (res.estimate) {
            v_eps.push_back(res.estimate->v_eps_hat);
            sqrt_eta.push_back(res.estimate->sqrt_eta_hat);
        }
    }
    r.estimates = v_eps.size();
    mean_std(v_eps, r.v_eps_mean, r.v_eps_std);
    mean_std(sqrt_eta, r.sqrt_eta_mean, r.sqrt_eta_std);
    return r;
}

EnsembleRun run_ensemble(const ProtocolConfig& config, Scenario scenario, std::size_t trials,
                         const RunOptions& options) {
    if (trials == 0) throw std::invalid_argument("an ensemble needs at least one trial");
    validate_config(config);
    EnsembleRun run;
    run.results.resize(trials);

    unsigned workers = options.parallel ? options.parallel : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(trials)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t k = next++; k < trials; k = next++) {
            try {
                run.results[k] = run_scenario(config, scenario, options, k);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = trials;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    run.report = summarize(scenario, run.results);
    return run;
}

CsvText results_csv(const std::vector<ScenarioResult>& results) {
    CsvText csv(
        "trial,scenario,seed,detected,estimated_delay,c_max,threshold,noise_floor_std,"
        "phase_estimate,aligned_phase,sqrt_eta_hat,vn_hat,v_eps_hat,var_v_eps,"
        "v_eps_threshold,spoof_detected,aligned_statistic,aligned_detection,delay_correct,"
        "lag_evaluations,lag_false_alarms,profile_false_alarm");
    for (const auto& r : results) {
        const auto opt = [](const auto& o, auto field) {
            return o ? format_number((*o).*field) : std::string();
        };
        csv.add_row({std::to_string(r.trial), to_string(r.scenario), std::to_string(r.seed),
                     std::to_string(r.ranging.detected), std::to_string(r.ranging.estimated_delay),
                     format_number(r.profile_summary.c_max), format_number(r.ranging.threshold_used),
                     format_number(r.profile_summary.noise_floor_std),
                     format_number(r.ranging.phase_estimate), format_number(r.aligned_phase),
                     opt(r.estimate, &NoiseEstimate::sqrt_eta_hat),
                     opt(r.estimate, &NoiseEstimate::vn_hat),
                     opt(r.estimate, &NoiseEstimate::v_eps_hat),
                     opt(r.estimate, &NoiseEstimate::var_v_eps),
                     opt(r.security, &SecurityVerdict::v_eps_threshold),
                     r.security ? std::to_string(r.security->spoof_detected) : std::string(),
                     format_number(r.score.aligned_statistic),
                     std::to_string(r.score.aligned_detection),
                     std::to_string(r.score.delay_correct),
                     std::to_string(r.score.lag_evaluations),
                     std::to_string(r.score.lag_false_alarms),
                     std::to_string(r.score.profile_false_alarm)});
    }
    return csv;
}

std::string summary_text(const EnsembleReport& r) {
    std::ostringstream out;
    const auto rate = [&](const char* name, const Rate& x) {
        out << name << " = " << format_number(x.value()) << '\n'
            << name << "_ci95 = " << format_number(x.half_width()) << '\n'
            << name << "_count = " << x.hits << '/' << x.trials << '\n';
    };
    out << "scenario = " << to_string(r.scenario) << '\n' << "trials = " << r.trials << '\n';
    rate("empirical_p_d", r.empirical_p_d);
    rate("empirical_p_fa_per_lag", r.empirical_p_fa);
    rate("empirical_p_fa_per_profile", r.profile_p_fa);
    rate("ranging_detected", r.ranging_detected);
    rate("delay_accuracy", r.delay_accuracy);
    rate("spoof_alarm", r.spoof_alarm);
    out << "estimates = " << r.estimates << '\n'
        << "v_eps_mean = " << format_number(r.v_eps_mean) << '\n'
        << "v_eps_std = " << format_number(r.v_eps_std) << '\n'
        << "sqrt_eta_mean = " << format_number(r.sqrt_eta_mean) << '\n'
        << "sqrt_eta_std = " << format_number(r.sqrt_eta_std) << '\n';
    return out.str();
}

std::vector<RocRecord> analytic_roc_records(const ProtocolConfig& config) {
    std::vector<RocRecord> out;
    const auto tm = target_model(config);
    const auto tgrid =
        linear_grid(-4.0 * std::sqrt(tm.var_floor), tm.c_max + 4.0 * std::sqrt(tm.var_peak));
    for (const auto& p : target_roc_analytic(config, tgrid))
        out.push_back({p.threshold, p.p_fa, p.p_d, "target", "analytic"});
    const auto sm = security_model(config);
    const auto sgrid = linear_grid(
        sm.mean_honest - 4.0 * std::sqrt(sm.var_honest),
        std::max(sm.mean_spoof + 4.0 * std::sqrt(sm.var_spoof),
                 sm.mean_honest + 6.0 * std::sqrt(sm.var_honest)));
    for (const auto& p : security_roc_analytic(config, sgrid))
        out.push_back({p.threshold, p.p_fa, p.p_d, "security", "analytic"});
    return out;
}

std::vector<RocRecord> empirical_security_roc(const std::vector<ScenarioResult>& honest,
                                              const std::vector<ScenarioResult>& spoofed,
                                              const std::vector<double>& thresholds) {
    const auto exceed = [](const std::vector<ScenarioResult>& rs, double th) {
        std::size_t n = 0, hits = 0;
        for (const auto& r : rs) {
            if (!r.estimate) continue;
            ++n;
            hits += r.estimate->v_eps_hat > th;
        }
        return n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
    };
    std::vector<RocRecord> out;
    for (double th : thresholds)
        out.push_back({th, exceed(honest, th), exceed(spoofed, th), "security", "montecarlo"});
    return out;
}

void emit_results(const ResultBundle& bundle, const std::filesystem::path& dir) {
    OutputDirectory out(dir);
    if (!bundle.results.empty()) out.write("results.csv", results_csv(bundle.results));
    if (!bundle.reports.empty()) {
        std::string text;
        for (const auto& r : bundle.reports) text += summary_text(r) + "\n";
        out.write_text("summary.txt", text,
                       static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')));
    }
    if (!bundle.roc.empty()) out.write("roc.csv", roc_csv(bundle.roc));
    if (bundle.profile) out.write("profile.csv", profile_csv(*bundle.profile));
    if (bundle.table) out.write("table.csv", table_csv(*bundle.table));
    if (bundle.config) {
        const auto text = format_config(*bundle.config);
        out.write_text("config.txt", text,
                       static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')));
    }
    out.write_manifest();
}

}  // namespace qlidar
