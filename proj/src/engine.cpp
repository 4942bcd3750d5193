#include "credaudit/engine.hpp"

#include <algorithm>
#include <chrono>
#include <set>

namespace credaudit {
namespace {

std::string now_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool lengths_differ(std::size_t a, std::size_t b, std::size_t tolerance) {
  return (a > b ? a - b : b - a) > tolerance;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::RejectedStep1: return "rejected_step1";
    case Verdict::RejectedStep2: return "rejected_step2";
    case Verdict::RejectedStep3: return "rejected_step3";
    case Verdict::Candidate: return "candidate";
  }
  return "?";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::WeakPassword: return "weak_password";
    case Outcome::UniversalPassword: return "universal_password";
    case Outcome::StrongNoFinding: return "strong_no_finding";
    case Outcome::Unstable: return "unstable";
    case Outcome::Captcha: return "captcha";
    case Outcome::AnalysisFailed: return "analysis_failed";
    case Outcome::Unreachable: return "unreachable";
  }
  return "?";
}

StepOutcome judge(const ResponsePage& page, const Baseline& baseline,
                  const FormDescriptor& form, const Blacklist& blacklist, LengthMode mode,
                  std::size_t tolerance) {
  const std::string text = ascii_lower(page.decoded_text);
  if (auto kw = blacklist.match_failure_keyword(text))
    return {Verdict::RejectedStep1, kw};
  if (check_login_keys(page.decoded_text, form).any())
    return {Verdict::RejectedStep2, std::nullopt};
  if (!lengths_differ(metric_length(page, mode), baseline.error_length, tolerance))
    return {Verdict::RejectedStep3, std::nullopt};
  return {Verdict::Candidate, std::nullopt};
}

Engine::Engine(EngineConfig config, Blacklist blacklist, Hooks hooks)
    : cfg_(std::move(config)), blacklist_(std::move(blacklist)), hooks_(std::move(hooks)) {
  rng_.seed(cfg_.seed ? cfg_.seed : std::random_device{}());
}

std::string Engine::random_wrong_password() {
  static const char alphabet[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::uniform_int_distribution<int> pick(0, sizeof(alphabet) - 2);
  std::string out;
  for (int i = 0; i < 16; ++i) out += alphabet[pick(rng_)];
  return out;
}

void Engine::log_row(AttemptRecord record) {
  record.timestamp = now_timestamp();
  record.target = target_;
  log_.push_back(record);
  if (hooks_.log) hooks_.log(log_.back());
}

Engine::Submission Engine::perform_submit(Session& session, const FormDescriptor& form,
                                          const Credential& cred, AttemptKind kind,
                                          const Baseline& baseline,
                                          const std::string& login_url) {
  ParamList payload = build_payload(form, cred.username, cred.password);
  Submission out;
  out.page = session.submit(form, payload);
  out.record.kind = kind;
  out.record.username = cred.username;
  out.record.password = cred.password;
  out.record.body_length = metric_length(out.page, cfg_.length_mode);
  out.record.event = classify_event(kind, out.page, baseline, form, blacklist_, login_url);
  if (*out.record.event != BlastEvent::E8 && *out.record.event != BlastEvent::E9)
    out.record.cause = failure_cause(out.page, blacklist_).cause;
  return out;
}

Baseline Engine::preprocess(Session& session, const FormDescriptor& form) {
  // Two distinct random wrong passwords; the page is stable when both final
  // lengths agree, and that common length becomes the EL benchmark.
  Baseline provisional;
  provisional.stable = true;  // classification during probing needs a baseline
  std::string w1 = random_wrong_password();
  std::string w2 = random_wrong_password();
  while (w2 == w1) w2 = random_wrong_password();

  Credential c1{cfg_.username, w1, CredentialOrigin::General};
  Credential c2{cfg_.username, w2, CredentialOrigin::General};
  Submission s1 = perform_submit(session, form, c1, AttemptKind::Probe, provisional,
                                 form.action_url);
  log_row(s1.record);
  Submission s2 = perform_submit(session, form, c2, AttemptKind::Probe, provisional,
                                 form.action_url);
  log_row(s2.record);

  Baseline out;
  std::size_t len1 = metric_length(s1.page, cfg_.length_mode);
  std::size_t len2 = metric_length(s2.page, cfg_.length_mode);
  out.stable = !lengths_differ(len1, len2, cfg_.el_tolerance);
  out.error_length = len1;
  out.established_at = static_cast<int>(log_.size()) - 1;
  return out;
}

bool Engine::recheck(Session& session, const FormDescriptor& form,
                     const Credential& candidate) {
  // Fresh pre-request, one new wrong password e1, then the candidate s.
  // Equal lengths mean a lockout-style page is answering everything.
  ResponsePage pre = session.pre_request(form.action_url);
  AttemptRecord rec;
  rec.kind = AttemptKind::PreRequest;
  rec.body_length = metric_length(pre, cfg_.length_mode);
  log_row(rec);

  Baseline provisional;
  provisional.stable = true;
  // e1 must be genuinely wrong: an injection-payload username would trip the
  // vulnerability again, so universal candidates get the benign username back
  std::string probe_user = candidate.origin == CredentialOrigin::Universal
                               ? cfg_.username
                               : candidate.username;
  Credential wrong{probe_user, random_wrong_password(), candidate.origin};
  Submission se = perform_submit(session, form, wrong, AttemptKind::RecheckProbe,
                                 provisional, form.action_url);
  log_row(se.record);
  Submission ss = perform_submit(session, form, candidate, AttemptKind::RecheckConfirm,
                                 provisional, form.action_url);
  bool confirmed = lengths_differ(metric_length(se.page, cfg_.length_mode),
                                  metric_length(ss.page, cfg_.length_mode),
                                  cfg_.el_tolerance);
  ss.record.detail = confirmed ? "recheck:confirmed" : "recheck:equal-length";
  log_row(ss.record);
  return confirmed;
}

struct Engine::AttemptJudgment {
  bool confirmed = false;
  bool abort_target = false;
  std::string note;
};

BlastResult Engine::blast(const std::string& target, const std::vector<CmsRule>& rules) {
  BlastResult result;
  result.target = target;
  target_ = target;
  log_.clear();
  probe_report_.reset();

  SessionConfig scfg = cfg_.session;
  if (!scfg.seed && cfg_.seed) scfg.seed = cfg_.seed;
  Session session(scfg);

  try {
    ResponsePage login_page = session.pre_request(target);
    {
      AttemptRecord rec;
      rec.kind = AttemptKind::PreRequest;
      rec.body_length = metric_length(login_page, cfg_.length_mode);
      log_row(rec);
    }
    const std::string login_url = login_page.final_url;

    const CmsRule* rule = match_rule(rules, login_page.decoded_text);
    if (rule) result.matched_rule = rule->name;
    if (rule && rule->alert == 1 && !rule->note.empty()) result.note = rule->note;
    if (rule && rule->captcha == 1 && cfg_.skip_captcha) {
      result.outcome = Outcome::Captcha;
      result.note = "rule '" + rule->name + "' marks this CMS as captcha-protected";
      return result;
    }

    auto verdict = identify_login_page(login_page);
    if (verdict.kind == PageKind::Captcha) {
      result.outcome = Outcome::Captcha;
      return result;
    }
    if (verdict.kind == PageKind::NotLogin) {
      result.outcome = Outcome::AnalysisFailed;
      result.note = "not a login page";
      return result;
    }

    FormDescriptor form;
    try {
      form = analyze_login_form(login_page, login_url);
    } catch (const analysis_error& e) {
      result.outcome = Outcome::AnalysisFailed;
      result.note = e.what();
      return result;
    }

    Baseline baseline = preprocess(session, form);
    if (!baseline.stable) {
      result.outcome = Outcome::Unstable;
      return result;
    }

    std::set<std::pair<std::string, std::string>> attempted;
    std::vector<FailureCause> failures;
    std::string username = cfg_.username;

    auto try_credential = [&](const Credential& cred, AttemptKind kind) -> AttemptJudgment {
      AttemptJudgment j;
      if (!attempted.insert({cred.username, cred.password}).second) return j;

      Submission sub = perform_submit(session, form, cred, kind, baseline, login_url);
      result.events.push_back(*sub.record.event);
      result.attempts += 1;

      const std::string text = ascii_lower(sub.page.decoded_text);
      if (rule && !rule->fail_flag.empty() &&
          text.find(ascii_lower(rule->fail_flag)) != std::string::npos) {
        sub.record.detail = "rule:fail_flag";
        log_row(sub.record);
        j.abort_target = true;
        j.note = "rule '" + rule->name + "' fail_flag matched";
        return j;
      }
      if (rule && !rule->success_flag.empty() &&
          text.find(ascii_lower(rule->success_flag)) != std::string::npos) {
        sub.record.detail = "rule:success_flag";
        log_row(sub.record);
        j.confirmed = true;  // rule override: no recheck needed
        return j;
      }

      StepOutcome step = judge(sub.page, baseline, form, blacklist_, cfg_.length_mode,
                               cfg_.el_tolerance);
      sub.record.detail = to_string(step.verdict);
      if (step.verdict == Verdict::RejectedStep1 && step.matched_keyword)
        sub.record.detail += ":" + *step.matched_keyword;
      if (step.verdict == Verdict::RejectedStep2) {
        KeyPresence keys = check_login_keys(sub.page.decoded_text, form);
        sub.record.detail += keys.attribute_hit && keys.substring_hit ? ":attr+substr"
                             : keys.attribute_hit                     ? ":attr"
                                                                      : ":substr";
      }
      log_row(sub.record);

      if (step.verdict == Verdict::Candidate) {
        j.confirmed = cfg_.recheck_enabled ? recheck(session, form, cred) : true;
        if (!j.confirmed) failures.push_back(failure_cause(sub.page, blacklist_));
      } else {
        failures.push_back(failure_cause(sub.page, blacklist_));
      }
      return j;
    };

    auto run_list = [&](const std::vector<Credential>& creds,
                        AttemptKind kind) -> std::optional<AttemptJudgment> {
      for (const auto& cred : creds) {
        AttemptJudgment j = try_credential(cred, kind);
        if (j.confirmed || j.abort_target) {
          if (j.confirmed) result.credential = cred;
          return j;
        }
      }
      return std::nullopt;
    };

    auto dictionary_round = [&](const std::string& user)
        -> std::optional<AttemptJudgment> {
      std::vector<Credential> creds = general_dict(user);
      for (const auto& pw : dynamic_dict(target))
        creds.push_back({user, pw, CredentialOrigin::Dynamic});
      return run_list(creds, AttemptKind::Dictionary);
    };

    std::optional<AttemptJudgment> hit = dictionary_round(username);

    // PCFG round with hint adjustment, when a grammar is configured.
    if (!hit && cfg_.grammar) {
      HintSet hints;
      if (cfg_.hint_adjustment) {
        std::vector<std::string> history_users;
        if (hooks_.success_history) history_users = hooks_.success_history();
        hints = collect_hints(login_page, failures, history_users);
      }
      AdjustedDictionary adjusted =
          adjust_dictionary(*cfg_.grammar, hints, log_, cfg_.hint_boost);

      if (adjusted.request_username_probe && !cfg_.probe_candidates.empty()) {
        ProbeConfig pc = cfg_.probe;
        if (!pc.seed) pc.seed = cfg_.seed + 1;
        try {
          probe_report_ = probe_usernames(session, form, cfg_.probe_candidates, pc,
                                          [&](const AttemptRecord& r) {
                                            AttemptRecord copy = r;
                                            log_row(copy);
                                          });
        } catch (const probe_error&) {
          // an aborted probe is advisory only; keep blasting as configured
        }
        if (probe_report_ && probe_report_->confirmed &&
            *probe_report_->confirmed != username) {
          username = *probe_report_->confirmed;
          hit = dictionary_round(username);  // replay the dictionary for the real user
        }
      }

      std::size_t taken = 0;
      while (!hit && taken < cfg_.pcfg_guess_limit) {
        auto guess = adjusted.stream.next();
        if (!guess) break;
        ++taken;
        bool from_hint = std::any_of(
            hints.entries.begin(), hints.entries.end(), [&](const HintSet::Entry& e) {
              return guess->password.find(e.keyword) != std::string::npos;
            });
        Credential cred{username, guess->password,
                        from_hint ? CredentialOrigin::Hint : CredentialOrigin::Pcfg};
        AttemptJudgment j = try_credential(cred, AttemptKind::Dictionary);
        if (j.confirmed || j.abort_target) {
          if (j.confirmed) result.credential = cred;
          hit = j;
        }
      }
    }

    if (hit && hit->confirmed) {
      result.outcome = result.credential->origin == CredentialOrigin::Universal
                           ? Outcome::UniversalPassword
                           : Outcome::WeakPassword;
      if (hooks_.record_success && !result.credential->username.empty())
        hooks_.record_success(result.credential->username);
      return result;
    }
    if (hit && hit->abort_target) {
      result.outcome = Outcome::StrongNoFinding;
      result.note = hit->note;
      return result;
    }

    // Dictionary exhausted: universal-password module, unless disabled.
    bool universal_on = cfg_.universal_enabled && (!rule || rule->exp_able != 0);
    if (universal_on) {
      if (auto uni = run_list(universal_dict(rule), AttemptKind::Universal)) {
        if (uni->confirmed) {
          result.outcome = Outcome::UniversalPassword;
          if (hooks_.record_success) hooks_.record_success(result.credential->username);
        } else {
          result.outcome = Outcome::StrongNoFinding;
          result.note = uni->note;
        }
        return result;
      }
    }

    result.outcome = Outcome::StrongNoFinding;
    return result;
  } catch (const transport_error& e) {
    result.outcome = Outcome::Unreachable;
    result.note = e.what();
    return result;
  } catch (const std::exception& e) {
    result.outcome = Outcome::AnalysisFailed;
    result.note = e.what();
    return result;
  }
}

}  // namespace credaudit
