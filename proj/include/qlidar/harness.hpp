// End-to-end protocol runs and seeded Monte Carlo ensembles.
//
// A trial executes: modulate -> channel -> moving correlation -> detection ->
// phase estimate on the aligned frame -> compensation -> regression ->
// excess-noise decision. The receiver half never looks at the scenario or the
// true delay; only TrialScore does, to grade the trial against ground truth.

#pragma once

#include "qlidar/core.hpp"
#include "qlidar/estimation.hpp"
#include "qlidar/io.hpp"
#include "qlidar/optics.hpp"
#include "qlidar/ranging.hpp"
#include "qlidar/sweep.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlidar {

struct RunOptions {
    NoiseFloorSource noise_floor = NoiseFloorSource::empirical;
    ChannelMode channel_mode = ChannelMode::term_by_term;
    CorrelationMethod correlation = CorrelationMethod::fft;
    bool verbose = false;  // keep every intermediate artifact
    unsigned parallel = 0;  // ensemble worker threads; 0 = hardware concurrency
};

struct ProfileSummary {
    std::size_t peak_lag = 0;
    double c_max = 0.0;
    double noise_floor_std = 0.0;
};

struct TrialScore {
    double analytic_threshold = 0.0;  // k sqrt(V_C^nf), honest model
    // |C_nu| at the true lag for the sequence that dominates under the
    // configured drift; compared against analytic_threshold.
    double aligned_statistic = 0.0;
    bool aligned_detection = false;
    bool delay_match = false;    // estimated_delay == true_delay
    bool delay_correct = false;  // detected and delay_match
    // One-sided C_nu > threshold over misaligned lags whose receive span lies
    // inside the echo, counting both sequences.
    std::size_t lag_evaluations = 0;
    std::size_t lag_false_alarms = 0;
    bool profile_false_alarm = false;  // any misaligned lag with max |C| >= threshold
};

struct ScenarioArtifacts {
    TransmitFrame frame;
    ReceiveFrame receive;
    CorrelationProfile profile;
    std::optional<TransmitFrame> compensated;
};

struct ScenarioResult {
    Scenario scenario = Scenario::honest;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    RangingVerdict ranging;
    double aligned_phase = 0.0;  // drift re-estimated over the whole aligned frame; NaN if none
    std::optional<NoiseEstimate> estimate;
    std::optional<SecurityVerdict> security;
    ProfileSummary profile_summary;
    TrialScore score;
    std::optional<ScenarioArtifacts> artifacts;
};

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string step, const std::string& what);
    const std::string& step() const noexcept { return step_; }

private:
    std::string step_;
};

/// One trial; its random stream is substream `trial` of config.rng_seed.
ScenarioResult run_scenario(const ProtocolConfig& config, Scenario scenario,
                            const RunOptions& options = {}, std::uint64_t trial = 0);

struct Rate {
    std::size_t hits = 0;
    std::size_t trials = 0;

    double value() const noexcept;
    double half_width(double z = 1.96) const noexcept;  // z sqrt(p(1-p)/n)
};

struct EnsembleReport {
    Scenario scenario = Scenario::honest;
    std::size_t trials = 0;
    Rate empirical_p_d;       // aligned-lag detection
    Rate empirical_p_fa;      // per-lag false alarms
    Rate profile_p_fa;        // per-profile false alarms
    Rate ranging_detected;    // verdict.detected
    Rate delay_accuracy;      // estimated_delay == true_delay
    Rate spoof_alarm;         // over trials that reached the security check
    std::size_t estimates = 0;
    double v_eps_mean = 0.0;
    double v_eps_std = 0.0;
    double sqrt_eta_mean = 0.0;
    double sqrt_eta_std = 0.0;
};

EnsembleReport summarize(Scenario scenario, const std::vector<ScenarioResult>& results);

struct EnsembleRun {
    EnsembleReport report;
    std::vector<ScenarioResult> results;  // indexed by trial
};

/// Trials 0..trials-1, executed on options.parallel threads. Output does not
/// depend on the thread count.
EnsembleRun run_ensemble(const ProtocolConfig& config, Scenario scenario, std::size_t trials,
                         const RunOptions& options = {});

// Persistence -------------------------------------------------------------

CsvText results_csv(const std::vector<ScenarioResult>& results);
std::string summary_text(const EnsembleReport& report);

/// Analytic target and security ROC curves for the config.
std::vector<RocRecord> analytic_roc_records(const ProtocolConfig& config);

/// Empirical (P_fa, P_d) of the excess-noise statistic at each threshold,
/// from honest and spoofed ensembles.
std::vector<RocRecord> empirical_security_roc(const std::vector<ScenarioResult>& honest,
                                              const std::vector<ScenarioResult>& spoofed,
                                              const std::vector<double>& thresholds);

struct ResultBundle {
    std::vector<ScenarioResult> results;
    std::vector<EnsembleReport> reports;
    std::vector<RocRecord> roc;
    std::optional<CorrelationProfile> profile;
    std::optional<Table> table;
    std::optional<ProtocolConfig> config;
};

/// Writes results.csv, summary.txt, roc.csv, profile.csv, table.csv and
/// config.txt for whichever parts are present, then manifest.txt. Throws
/// IoError with the offending path.
void emit_results(const ResultBundle& bundle, const std::filesystem::path& dir);

}  // namespace qlidar
