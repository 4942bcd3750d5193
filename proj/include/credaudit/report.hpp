#ifndef CREDAUDIT_REPORT_HPP
#define CREDAUDIT_REPORT_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "credaudit/engine.hpp"

namespace credaudit {

/// Ground truth for one target: a real credential, a SQL-injection
/// vulnerability, or nothing.
struct TargetTruth {
  enum class Kind { None, Credential, Sqli } kind = Kind::None;
  std::string username;
  std::string password;
};

std::map<std::string, TargetTruth> truth_from_json(const std::string& json_text);
std::map<std::string, TargetTruth> load_truth(const std::string& path);

/// Counts are kept as integers; percentages are formatted only at print time
/// so p_correct * n_success == n_effect holds exactly.
struct Metrics {
  long n_success = 0;
  long n_fail = 0;
  long n_effect = 0;
  long n_wrong = 0;
  long n_error = 0;  // unreachable/analysis-failed/unstable/captcha, reported separately

  std::optional<double> p_correct() const {
    if (n_success == 0) return std::nullopt;
    return static_cast<double>(n_effect) / static_cast<double>(n_success);
  }
  double p_recognize() const {
    long denom = n_success + n_fail;
    return denom == 0 ? 0.0 : static_cast<double>(n_effect) / static_cast<double>(denom);
  }
};

std::string format_percent(double fraction);  // "93.75%"

Metrics compute_metrics(const std::vector<BlastResult>& results,
                        const std::map<std::string, TargetTruth>& truth);

struct ScanReport {
  std::vector<BlastResult> results;
  std::map<std::string, long> outcome_counts;
  std::map<std::string, long> event_histogram;
  std::optional<Metrics> metrics;
  // username-prober output per target, with per-round leaders and medians;
  // timing data is measured, so these entries are not seed-reproducible
  std::map<std::string, ProbeReport> probe_reports;
  std::uint64_t seed = 0;
};

std::string report_to_json(const ScanReport& report);
std::vector<BlastResult> results_from_report_json(const std::string& json_text);

// ---------------------------------------------------------------------------
// False-positive model

/// Interference-event probabilities P(N1..N7) and per-event exclusion
/// probabilities Q(R1..R6). N7 has no exclusion step and contributes fully.
struct EventModel {
  std::array<double, 7> event_probs{};      // P(N1)..P(N7)
  std::array<double, 6> exclusion_probs{};  // Q(R1)..Q(R6)

  bool valid() const;  // every probability in [0,1]
};

/// P(mistake) = sum over i=1..6 of P(Ni)(1 - Q(Ri)) + P(N7).
double estimate_false_positive(const EventModel& model);

/// Step-coverage matrix: which judgment step rejects which event.
/// A = blacklist keywords, B = login keys, C = length vs EL, D = recheck.
enum class JudgeStep { A, B, C, D };

std::string to_string(JudgeStep step);

const std::map<JudgeStep, std::vector<int>>& step_coverage();

/// Steps covering one event, in A..D order; the union expressions
/// Q(R1)=Q(B1 u C1) ... Q(R6)=Q(A6) are derived from the matrix.
std::vector<JudgeStep> exclusion_steps(int event);

/// Q(Ri) under step independence: 1 - prod over covering steps of (1 - Q(Ki)).
double exclusion_from_steps(int event, const std::map<JudgeStep, std::array<double, 7>>& q);

// ---------------------------------------------------------------------------
// Batch front door

struct BatchConfig {
  EngineConfig engine;
  Blacklist blacklist = default_blacklist();
  int concurrency = 8;
  bool authorized = false;  // non-loopback targets require explicit authorization
  std::vector<CmsRule> rules;
  std::function<void(const AttemptRecord&)> log;
};

class authorization_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs one engine per target with bounded concurrency. Success-history hints
/// flow between targets only when concurrency == 1: concurrent engines share
/// nothing mutable.
ScanReport run_batch(const std::vector<std::string>& targets, const BatchConfig& config);

std::vector<std::string> load_targets(const std::string& path);

}  // namespace credaudit

#endif
