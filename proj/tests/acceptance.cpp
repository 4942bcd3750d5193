// Acceptance suite: one check per criterion, one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <thread>
#include <vector>

#include "credaudit/dictionaries.hpp"
#include "credaudit/engine.hpp"
#include "credaudit/pcfg.hpp"
#include "credaudit/report.hpp"
#include "credaudit/simulator.hpp"

using namespace credaudit;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

void report(int id, const std::string& name, const Check& check, double seconds) {
  std::printf("criterion %2d [%s]: %s (%.2fs)%s%s\n", id, name.c_str(),
              check.ok ? "PASS" : "FAIL", seconds,
              check.ok ? "" : " -- ", check.ok ? "" : check.detail.c_str());
  if (!check.ok) ++g_failures;
}

void run(int id, const std::string& name, const std::function<void(Check&)>& body) {
  Check check;
  auto start = Clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.expect(false, std::string("exception: ") + e.what());
  }
  double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  report(id, name, check, seconds);
}

Engine engine_with_seed(std::uint64_t seed, bool recheck = true) {
  EngineConfig cfg;
  cfg.seed = seed;
  cfg.recheck_enabled = recheck;
  return Engine(cfg, default_blacklist());
}

// The independent enumeration oracle for criterion 6: full cross product,
// factors multiplied in the same left-to-right order, sorted descending with
// lexicographic ties.
std::vector<ScoredGuess> brute_force_guesses(const PcfgGrammar& g) {
  std::vector<ScoredGuess> all;
  for (const auto& [name, structure_prob] : g.structures) {
    auto tokens = parse_structure(name);
    std::vector<std::vector<std::pair<std::string, double>>> buckets;
    bool ok = true;
    for (const auto& t : tokens) {
      auto it = g.segments.find({static_cast<char>(t.cls), t.length});
      if (it == g.segments.end() || it->second.empty()) {
        ok = false;
        break;
      }
      buckets.emplace_back(it->second.begin(), it->second.end());
    }
    if (!ok) continue;
    std::vector<size_t> idx(buckets.size(), 0);
    for (;;) {
      std::string pw;
      double p = structure_prob;
      for (size_t i = 0; i < buckets.size(); ++i) {
        pw += buckets[i][idx[i]].first;
        p *= buckets[i][idx[i]].second;
      }
      all.push_back({pw, p});
      size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (++idx[i] < buckets[i].size()) break;
        idx[i] = 0;
      }
      if (i == idx.size()) break;
    }
  }
  std::sort(all.begin(), all.end(), [](const ScoredGuess& a, const ScoredGuess& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.password < b.password;
  });
  return all;
}

void criterion_1_dedecms_trace(Check& c) {
  SimServer server(scenario_by_name("dedecms_like"));
  Engine engine = engine_with_seed(1001);
  BlastResult result = engine.blast(server.login_url());

  c.expect(result.outcome == Outcome::WeakPassword, "outcome is not WeakPassword");
  c.expect(result.credential && result.credential->username == "admin" &&
               result.credential->password == "yzddmr6123",
           "credential is not admin/yzddmr6123");
  c.expect(result.attempts == 30, "credential not found at dictionary position 30");

  const auto& log = engine.attempt_log();
  c.expect(log.size() == 36, "unexpected attempt-log shape");
  if (log.size() == 36) {
    c.expect(log[0].kind == AttemptKind::PreRequest, "log does not start with a pre-request");
    c.expect(log[1].kind == AttemptKind::Probe && log[1].body_length == 1490,
             "first preprocessing probe is not 1490 bytes");
    c.expect(log[2].kind == AttemptKind::Probe && log[2].body_length == 1490,
             "second preprocessing probe is not 1490 bytes");
    for (int i = 3; i < 32; ++i)
      c.expect(log[i].kind == AttemptKind::Dictionary && log[i].body_length == 1490,
               "rejected attempt " + std::to_string(i - 2) + " is not 1490 bytes");
    c.expect(log[32].kind == AttemptKind::Dictionary && log[32].body_length == 1920,
             "candidate page is not 1920 bytes");
    c.expect(log[32].password == "yzddmr6123", "candidate is not yzddmr6123");
    c.expect(log[33].kind == AttemptKind::PreRequest, "recheck did not re-run a pre-request");
    c.expect(log[34].kind == AttemptKind::RecheckProbe && log[34].body_length == 1490,
             "recheck wrong probe is not 1490 bytes");
    c.expect(log[35].kind == AttemptKind::RecheckConfirm && log[35].body_length == 1920,
             "recheck resubmission is not 1920 bytes");
  }
}

void criterion_2_discuz_trace(Check& c) {
  SimServer server(scenario_by_name("discuz_like"));
  Engine engine = engine_with_seed(1002);
  BlastResult result = engine.blast(server.login_url());
  c.expect(result.outcome == Outcome::WeakPassword, "outcome is not WeakPassword");
  c.expect(result.credential && result.credential->username == "admin" &&
               result.credential->password == "admin888",
           "credential is not admin/admin888");
  c.expect(result.attempts == 3, "admin888 was not hit at attempt 3");
}

void criterion_3_zero_false_positives(Check& c) {
  for (const char* name : {"dedecms_strong", "discuz_strong"}) {
    SimServer server(scenario_by_name(name));
    Engine engine = engine_with_seed(1003);
    BlastResult result = engine.blast(server.login_url());
    c.expect(result.outcome == Outcome::StrongNoFinding,
             std::string(name) + ": reported a finding on a strong password");
    c.expect(result.attempts == 58,
             std::string(name) + ": attempts != 33 dictionary + 25 universal");
    int dict = 0, uni = 0;
    for (const auto& r : engine.attempt_log()) {
      if (r.kind == AttemptKind::Dictionary) ++dict;
      if (r.kind == AttemptKind::Universal) ++uni;
    }
    c.expect(dict == 33, std::string(name) + ": dictionary attempts != 33");
    c.expect(uni == 25, std::string(name) + ": universal attempts != 25");
  }
}

void criterion_4_event_coverage(Check& c) {
  for (const auto& scenario : scenario_catalog()) {
    SimServer server(scenario);
    Engine engine = engine_with_seed(1004);
    BlastResult result = engine.blast(server.login_url());

    c.expect(result.outcome == scenario.expected_outcome,
             scenario.name + ": outcome " + to_string(result.outcome) +
                 " != expected " + to_string(scenario.expected_outcome));

    std::vector<BlastEvent> classified;
    for (const auto& r : engine.attempt_log())
      if (r.event) classified.push_back(*r.event);
    auto served = server.served_events();
    c.expect(classified.size() == served.size(),
             scenario.name + ": submission count mismatch vs ground truth");
    if (classified.size() == served.size()) {
      for (size_t i = 0; i < served.size(); ++i)
        c.expect(classified[i] == served[i],
                 scenario.name + ": submission " + std::to_string(i) + " classified " +
                     to_string(classified[i]) + " but served " + to_string(served[i]));
    }

    bool interference = scenario.expected_outcome != Outcome::WeakPassword &&
                        scenario.expected_outcome != Outcome::UniversalPassword;
    if (interference)
      c.expect(result.outcome != Outcome::WeakPassword &&
                   result.outcome != Outcome::UniversalPassword,
               scenario.name + ": interference scenario produced a success");
  }
}

void criterion_5_recheck_ablation(Check& c) {
  {
    SimServer server(scenario_by_name("lockout_equal_length"));
    Engine ablated = engine_with_seed(1005, /*recheck=*/false);
    BlastResult result = ablated.blast(server.login_url());
    c.expect(result.outcome == Outcome::WeakPassword ||
                 result.outcome == Outcome::UniversalPassword,
             "without step 4 the lockout scenario produced no false positive");
  }
  {
    SimServer server(scenario_by_name("lockout_equal_length"));
    Engine full = engine_with_seed(1005, /*recheck=*/true);
    BlastResult result = full.blast(server.login_url());
    c.expect(result.outcome == Outcome::StrongNoFinding,
             "with step 4 enabled the lockout scenario still produced a finding");
  }
}

void criterion_6_pcfg_oracle(Check& c) {
  // the worked single-password example with its factor decomposition
  auto single = train_pcfg({"password6789!"});
  auto split = split_password("password6789!");
  c.expect(split.structure == "L8D4S1", "structure is not L8D4S1");
  double product = single.structures.at("L8D4S1") *
                   single.segments.at({'L', 8}).at("password") *
                   single.segments.at({'D', 4}).at("6789") *
                   single.segments.at({'S', 1}).at("!");
  c.expect(std::abs(password_probability(single, "password6789!") - 1.0) <= 1e-12,
           "P(password6789!) != 1.0 on its own grammar");
  c.expect(std::abs(product - 1.0) <= 1e-12, "factor decomposition product != 1.0");

  std::vector<std::vector<std::string>> corpora = {
      {"password6789!"},
      {"aa11", "ab12", "ba11", "bb22", "cc33", "aa22"},
      {"admin123", "root888", "test000", "abc!", "a1b2c3", "zz##", "admin2020"},
      {"x1", "x2", "y1", "y2", "zzz999", "q!", "w@", "long4word", "ab", "cd"},
  };
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> letter('a', 'c');
  std::uniform_int_distribution<int> digit('0', '2');
  std::uniform_int_distribution<int> len(1, 3);
  for (int i = 0; i < 6; ++i) {
    std::vector<std::string> corpus;
    for (int k = 0; k < 10; ++k) {
      std::string pw;
      int n = len(rng);
      for (int j = 0; j < n; ++j) pw += static_cast<char>(letter(rng));
      n = len(rng);
      for (int j = 0; j < n; ++j) pw += static_cast<char>(digit(rng));
      corpus.push_back(pw);
    }
    corpora.push_back(corpus);
  }

  for (const auto& corpus : corpora) {
    auto g = train_pcfg(corpus);
    if (g.combination_count() > 10000) {
      c.expect(false, "oracle corpus exceeds the 10^4 combination bound");
      continue;
    }
    auto expected = brute_force_guesses(g);
    auto got = generate_guesses(g, expected.size() + 5);
    c.expect(got.size() == expected.size(), "guess count differs from enumeration");
    if (got.size() != expected.size()) continue;
    for (size_t i = 0; i < expected.size(); ++i) {
      c.expect(got[i].password == expected[i].password,
               "guess order diverges from the enumeration sort at index " +
                   std::to_string(i));
      c.expect(std::abs(got[i].probability - expected[i].probability) <= 1e-12,
               "probability diverges beyond 1e-12 at index " + std::to_string(i));
      if (!c.ok) break;
    }
  }
}

void criterion_7_dynamic_dictionary(Check& c) {
  const std::vector<std::string> expected = {
      "yzddmr6.com",  "webcrack",    "webcrack123",  "webcrack888",
      "webcrack666",  "webcrack123456", "yzddmr6",   "yzddmr6123",
      "yzddmr6888",   "yzddmr6666",  "yzddmr6123456",
  };
  c.expect(dynamic_dict("webcrack.yzddmr6.com") == expected,
           "dynamic_dict(webcrack.yzddmr6.com) differs from the 11-entry list");
  c.expect(dynamic_dict("http://1.2.3.4/admin").empty(),
           "IP-literal input produced a dynamic dictionary");
}

void criterion_8_timing_probe(Check& c) {
  const int kProbes = 100;
  const int kWorkers = 34;
  std::atomic<int> confirmed{0};
  std::atomic<int> next{0};

  auto worker = [&]() {
    SimServer server(scenario_by_name("timing_side_channel"));
    SessionConfig scfg;
    scfg.timeout_seconds = 30;
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= kProbes) return;
      scfg.seed = 5000 + static_cast<std::uint64_t>(i);
      Session session(scfg);
      auto form = analyze_login_form(session.get(server.login_url()), server.login_url());
      ProbeConfig pc;  // rounds=5, 4096 chars, 30% margin
      pc.seed = static_cast<std::uint64_t>(i) + 1;
      auto report = probe_usernames(session, form, {"admin", "ghost1", "ghost2"}, pc);
      if (report.confirmed && *report.confirmed == "admin") confirmed.fetch_add(1);
    }
  };

  std::vector<std::thread> pool;
  for (int t = 0; t < kWorkers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  c.expect(confirmed.load() >= 95,
           "planted username confirmed only " + std::to_string(confirmed.load()) +
               "/100 times");
}

void criterion_9_false_positive_formula(Check& c) {
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    EventModel m;
    for (auto& p : m.event_probs) p = unit(rng) / 7.0;
    for (auto& q : m.exclusion_probs) q = unit(rng);
    for (int k = 0; k < 5; ++k) m.exclusion_probs[k] = 1.0;  // Q(R1..R5) = 1

    double oracle = 0.0;
    for (int k = 5; k >= 0; --k) oracle += m.event_probs[k] * (1.0 - m.exclusion_probs[k]);
    oracle += m.event_probs[6];
    double reduced = m.event_probs[5] * (1.0 - m.exclusion_probs[5]) + m.event_probs[6];

    double got = estimate_false_positive(m);
    c.expect(std::abs(got - oracle) <= 1e-12, "estimate differs from the summation oracle");
    c.expect(std::abs(got - reduced) <= 1e-12,
             "estimate does not reduce to P(N6)(1-Q(R6)) + P(N7)");
    if (!c.ok) return;
  }
}

void criterion_10_metrics_arithmetic(Check& c) {
  std::vector<BlastResult> results;
  std::map<std::string, TargetTruth> truth;
  for (int i = 0; i < 80; ++i) {
    BlastResult r;
    r.target = "http://t" + std::to_string(i) + "/";
    r.outcome = Outcome::WeakPassword;
    Credential cred;
    cred.username = "admin";
    cred.password = "admin888";
    r.credential = cred;
    results.push_back(r);
    TargetTruth t;
    t.kind = TargetTruth::Kind::Credential;
    t.username = "admin";
    t.password = i < 75 ? "admin888" : "different";
    truth[r.target] = t;
  }
  for (int i = 0; i < 1014; ++i) {
    BlastResult r;
    r.target = "http://f" + std::to_string(i) + "/";
    r.outcome = Outcome::StrongNoFinding;
    results.push_back(r);
  }

  Metrics m = compute_metrics(results, truth);
  c.expect(m.n_success == 80 && m.n_effect == 75 && m.n_fail == 1014,
           "raw counts are wrong");
  c.expect(m.p_correct().has_value() && format_percent(*m.p_correct()) == "93.75%",
           "p_correct != 93.75%");
  c.expect(std::abs(m.p_recognize() - 75.0 / 1094.0) < 1e-15, "p_recognize fraction wrong");
  c.expect(std::abs(m.p_recognize() * 100.0 - 6.86) <= 0.01,
           "p_recognize not within 0.01pp of 6.86%");
}

}  // namespace

int main() {
  run(1, "dedecms trace replay", criterion_1_dedecms_trace);
  run(2, "discuz trace replay", criterion_2_discuz_trace);
  run(3, "zero false positives on strong passwords", criterion_3_zero_false_positives);
  run(4, "event coverage over the catalog", criterion_4_event_coverage);
  run(5, "recheck ablation", criterion_5_recheck_ablation);
  run(6, "pcfg oracle equivalence", criterion_6_pcfg_oracle);
  run(7, "dynamic dictionary exactness", criterion_7_dynamic_dictionary);
  run(8, "timing probe 100x", criterion_8_timing_probe);
  run(9, "false-positive formula", criterion_9_false_positive_formula);
  run(10, "metrics arithmetic", criterion_10_metrics_arithmetic);

  if (g_failures == 0)
    std::printf("all 10 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures;
}
