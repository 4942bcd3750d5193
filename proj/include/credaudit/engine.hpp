#ifndef CREDAUDIT_ENGINE_HPP
#define CREDAUDIT_ENGINE_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "credaudit/blacklist.hpp"
#include "credaudit/dictionaries.hpp"
#include "credaudit/events.hpp"
#include "credaudit/http_session.hpp"
#include "credaudit/page_analyzer.hpp"
#include "credaudit/pcfg.hpp"
#include "credaudit/prober.hpp"

namespace credaudit {

/// Preprocessing result: page stability and the Error Length benchmark.
/// error_length is meaningful only when stable.
struct Baseline {
  bool stable = false;
  std::size_t error_length = 0;
  int established_at = -1;  // attempt-log index of the probe that fixed EL
};

enum class Verdict { RejectedStep1, RejectedStep2, RejectedStep3, Candidate };

std::string to_string(Verdict v);

struct StepOutcome {
  Verdict verdict = Verdict::Candidate;
  std::optional<std::string> matched_keyword;  // present iff RejectedStep1
};

enum class Outcome {
  WeakPassword,
  UniversalPassword,
  StrongNoFinding,
  Unstable,
  Captcha,
  AnalysisFailed,
  Unreachable
};

std::string to_string(Outcome o);

struct BlastResult {
  std::string target;
  Outcome outcome = Outcome::StrongNoFinding;
  std::optional<Credential> credential;  // present iff Weak/UniversalPassword
  int attempts = 0;  // judged dictionary + universal submissions only
  std::vector<BlastEvent> events;
  std::string matched_rule;
  std::string note;
};

struct EngineConfig {
  std::string username = "admin";
  SessionConfig session;
  LengthMode length_mode = LengthMode::Body;
  std::size_t el_tolerance = 0;  // exact byte equality by default
  bool universal_enabled = true;
  bool recheck_enabled = true;
  bool skip_captcha = true;

  std::optional<PcfgGrammar> grammar;  // enables the PCFG/hint round
  std::size_t pcfg_guess_limit = 100;
  double hint_boost = 0.5;
  bool hint_adjustment = true;

  std::vector<std::string> probe_candidates;  // username prober, on demand
  ProbeConfig probe;

  std::uint64_t seed = 0;
};

/// The 4-step judgment chain over one response page:
///   1. keyword blacklist,  2. login keys still present,  3. length == EL.
/// Survivors are candidates for the recheck.
StepOutcome judge(const ResponsePage& page, const Baseline& baseline,
                  const FormDescriptor& form, const Blacklist& blacklist,
                  LengthMode mode = LengthMode::Body, std::size_t tolerance = 0);

/// Orchestrates one target end to end. One engine per target; strictly
/// sequential inside. Engines share only immutable configuration, the
/// blacklist and the trained grammar.
class Engine {
 public:
  struct Hooks {
    std::function<void(const AttemptRecord&)> log;
    // usernames from earlier successful blasts in the same batch
    std::function<std::vector<std::string>()> success_history;
    std::function<void(const std::string&)> record_success;
  };

  Engine(EngineConfig config, Blacklist blacklist, Hooks hooks = {});

  BlastResult blast(const std::string& target, const std::vector<CmsRule>& rules = {});

  Baseline preprocess(Session& session, const FormDescriptor& form);
  bool recheck(Session& session, const FormDescriptor& form, const Credential& candidate);

  const std::vector<AttemptRecord>& attempt_log() const { return log_; }
  const std::optional<ProbeReport>& probe_report() const { return probe_report_; }

 private:
  struct AttemptJudgment;
  struct Submission {
    ResponsePage page;
    AttemptRecord record;
  };

  std::string random_wrong_password();
  Submission perform_submit(Session& session, const FormDescriptor& form,
                            const Credential& cred, AttemptKind kind,
                            const Baseline& baseline, const std::string& login_url);
  void log_row(AttemptRecord record);

  EngineConfig cfg_;
  Blacklist blacklist_;
  Hooks hooks_;
  std::mt19937_64 rng_;
  std::string target_;
  std::vector<AttemptRecord> log_;
  std::optional<ProbeReport> probe_report_;
};

}  // namespace credaudit

#endif
