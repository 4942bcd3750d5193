#include "credaudit/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

namespace credaudit {

std::map<std::string, TargetTruth> truth_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed truth JSON: ") + e.what());
  }
  std::map<std::string, TargetTruth> out;
  for (const auto& [target, value] : doc.items()) {
    TargetTruth t;
    if (value.is_null()) {
      t.kind = TargetTruth::Kind::None;
    } else if (value.is_object() && value.value("sqli", false)) {
      t.kind = TargetTruth::Kind::Sqli;
    } else if (value.is_object()) {
      t.kind = TargetTruth::Kind::Credential;
      t.username = value.value("username", "");
      t.password = value.value("password", "");
    }
    out[target] = t;
  }
  return out;
}

std::map<std::string, TargetTruth> load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open truth file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return truth_from_json(text);
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

Metrics compute_metrics(const std::vector<BlastResult>& results,
                        const std::map<std::string, TargetTruth>& truth) {
  Metrics m;
  for (const auto& r : results) {
    switch (r.outcome) {
      case Outcome::WeakPassword:
      case Outcome::UniversalPassword: {
        m.n_success += 1;
        auto it = truth.find(r.target);
        bool effective = false;
        if (it != truth.end()) {
          const TargetTruth& t = it->second;
          if (r.outcome == Outcome::UniversalPassword) {
            effective = t.kind == TargetTruth::Kind::Sqli;
          } else if (t.kind == TargetTruth::Kind::Credential && r.credential) {
            effective = r.credential->username == t.username &&
                        r.credential->password == t.password;
          }
        }
        if (effective)
          m.n_effect += 1;
        else
          m.n_wrong += 1;
        break;
      }
      case Outcome::StrongNoFinding:
        m.n_fail += 1;
        break;
      default:
        m.n_error += 1;
        break;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

bool EventModel::valid() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return std::all_of(event_probs.begin(), event_probs.end(), in_unit) &&
         std::all_of(exclusion_probs.begin(), exclusion_probs.end(), in_unit);
}

double estimate_false_positive(const EventModel& model) {
  double p = model.event_probs[6];  // P(N7): no exclusion step exists for it
  for (int i = 0; i < 6; ++i)
    p += model.event_probs[i] * (1.0 - model.exclusion_probs[i]);
  return p;
}

std::string to_string(JudgeStep step) {
  switch (step) {
    case JudgeStep::A: return "A";
    case JudgeStep::B: return "B";
    case JudgeStep::C: return "C";
    case JudgeStep::D: return "D";
  }
  return "?";
}

const std::map<JudgeStep, std::vector<int>>& step_coverage() {
  static const std::map<JudgeStep, std::vector<int>> matrix = {
      {JudgeStep::A, {2, 3, 4, 5, 6}},
      {JudgeStep::B, {1, 2, 3}},
      {JudgeStep::C, {1, 2, 4}},
      {JudgeStep::D, {3, 5}},
  };
  return matrix;
}

std::vector<JudgeStep> exclusion_steps(int event) {
  std::vector<JudgeStep> out;
  for (const auto& [step, events] : step_coverage()) {
    if (std::find(events.begin(), events.end(), event) != events.end())
      out.push_back(step);
  }
  return out;  // map order is already A..D
}

double exclusion_from_steps(int event,
                            const std::map<JudgeStep, std::array<double, 7>>& q) {
  double miss = 1.0;
  for (JudgeStep step : exclusion_steps(event)) {
    auto it = q.find(step);
    double qi = it == q.end() ? 0.0 : it->second[static_cast<size_t>(event - 1)];
    miss *= (1.0 - qi);
  }
  return 1.0 - miss;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json result_to_json(const BlastResult& r) {
  nlohmann::ordered_json j;
  j["target"] = r.target;
  j["outcome"] = to_string(r.outcome);
  if (r.credential) {
    j["username"] = r.credential->username;
    j["password"] = r.credential->password;
    j["origin"] = to_string(r.credential->origin);
  }
  j["attempts"] = r.attempts;
  std::vector<std::string> events;
  events.reserve(r.events.size());
  for (auto e : r.events) events.push_back(to_string(e));
  j["events"] = events;
  if (!r.matched_rule.empty()) j["rule"] = r.matched_rule;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

}  // namespace

std::string report_to_json(const ScanReport& report) {
  nlohmann::ordered_json doc;
  doc["seed"] = report.seed;
  doc["targets"] = nlohmann::ordered_json::array();
  for (const auto& r : report.results) doc["targets"].push_back(result_to_json(r));
  doc["outcome_counts"] = report.outcome_counts;
  doc["event_histogram"] = report.event_histogram;
  if (report.metrics) {
    const Metrics& m = *report.metrics;
    nlohmann::ordered_json jm;
    jm["n_success"] = m.n_success;
    jm["n_fail"] = m.n_fail;
    jm["n_effect"] = m.n_effect;
    jm["n_wrong"] = m.n_wrong;
    jm["n_error"] = m.n_error;
    jm["p_correct"] = m.p_correct() ? format_percent(*m.p_correct()) : "n/a";
    jm["p_recognize"] = format_percent(m.p_recognize());
    doc["metrics"] = jm;
  } else {
    doc["metrics"] = nullptr;
  }
  if (!report.probe_reports.empty()) {
    doc["probe_reports"] = nlohmann::ordered_json::object();
    for (const auto& [target, probe] : report.probe_reports) {
      nlohmann::ordered_json jp;
      jp["confirmed"] = probe.confirmed ? nlohmann::ordered_json(*probe.confirmed)
                                        : nlohmann::ordered_json(nullptr);
      jp["margin"] = probe.margin;
      jp["round_leaders"] = probe.round_leaders;
      jp["ranked"] = nlohmann::ordered_json::array();
      for (const auto& trial : probe.ranked) {
        nlohmann::ordered_json jt;
        jt["username"] = trial.username;
        jt["median_ms"] = trial.median_ms;
        jt["samples_ms"] = trial.samples_ms;
        jp["ranked"].push_back(jt);
      }
      doc["probe_reports"][target] = jp;
    }
  }
  return doc.dump(2) + "\n";
}

std::vector<BlastResult> results_from_report_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed report JSON: ") + e.what());
  }
  std::vector<BlastResult> out;
  for (const auto& j : doc.at("targets")) {
    BlastResult r;
    r.target = j.at("target").get<std::string>();
    std::string outcome = j.at("outcome").get<std::string>();
    for (Outcome o : {Outcome::WeakPassword, Outcome::UniversalPassword,
                      Outcome::StrongNoFinding, Outcome::Unstable, Outcome::Captcha,
                      Outcome::AnalysisFailed, Outcome::Unreachable}) {
      if (to_string(o) == outcome) r.outcome = o;
    }
    if (j.contains("username")) {
      Credential c;
      c.username = j.value("username", "");
      c.password = j.value("password", "");
      c.origin = r.outcome == Outcome::UniversalPassword ? CredentialOrigin::Universal
                                                         : CredentialOrigin::General;
      r.credential = c;
    }
    r.attempts = j.value("attempts", 0);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> load_targets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open targets file: " + path);
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n' ||
                             line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    if (line[0] == '#') continue;
    if (!is_absolute_url(line))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": not an absolute http(s) URL: " + line);
    out.push_back(line);
  }
  return out;
}

ScanReport run_batch(const std::vector<std::string>& targets, const BatchConfig& config) {
  config.engine.session.validate();  // configuration problems are startup errors
  for (const auto& t : targets) {
    auto url = parse_url(t);
    if (!url) throw std::runtime_error("malformed target URL: " + t);
    if (!is_loopback_host(url->host) && !config.authorized)
      throw authorization_error(
          "target " + t + " is not loopback; pass --i-am-authorized to scan it");
  }

  ScanReport report;
  report.seed = config.engine.seed;
  report.results.resize(targets.size());

  std::mutex history_mu;
  std::vector<std::string> success_usernames;
  const bool share_history = config.concurrency <= 1;

  std::mutex log_mu;
  auto locked_log = [&](const AttemptRecord& rec) {
    if (!config.log) return;
    std::lock_guard<std::mutex> lock(log_mu);
    config.log(rec);
  };

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= targets.size()) return;

      EngineConfig cfg = config.engine;
      // per-target seed: deterministic regardless of thread scheduling
      cfg.seed = config.engine.seed + 0x9e3779b97f4a7c15ULL * (i + 1);
      cfg.session.seed = cfg.seed;

      Engine::Hooks hooks;
      hooks.log = locked_log;
      if (share_history) {
        hooks.success_history = [&]() {
          std::lock_guard<std::mutex> lock(history_mu);
          return success_usernames;
        };
        hooks.record_success = [&](const std::string& username) {
          std::lock_guard<std::mutex> lock(history_mu);
          if (std::find(success_usernames.begin(), success_usernames.end(), username) ==
              success_usernames.end())
            success_usernames.push_back(username);
        };
      }
      Engine engine(cfg, config.blacklist, hooks);
      try {
        report.results[i] = engine.blast(targets[i], config.rules);
      } catch (const std::exception& e) {
        // blast maps its own failures; anything escaping must not kill the pool
        report.results[i].target = targets[i];
        report.results[i].outcome = Outcome::AnalysisFailed;
        report.results[i].note = e.what();
      }
      if (engine.probe_report()) {
        std::lock_guard<std::mutex> lock(history_mu);
        report.probe_reports[targets[i]] = *engine.probe_report();
      }
    }
  };

  int threads = std::max(1, std::min<int>(config.concurrency,
                                          static_cast<int>(targets.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& r : report.results) {
    report.outcome_counts[to_string(r.outcome)] += 1;
    for (auto e : r.events) report.event_histogram[to_string(e)] += 1;
  }
  return report;
}

}  // namespace credaudit
