#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "credaudit/engine.hpp"
#include "credaudit/simulator.hpp"

using namespace credaudit;

namespace {

EngineConfig quick_config(std::uint64_t seed = 101) {
  EngineConfig cfg;
  cfg.seed = seed;
  cfg.session.timeout_seconds = 5;
  return cfg;
}

Engine make_engine(EngineConfig cfg = quick_config()) {
  return Engine(std::move(cfg), default_blacklist());
}

ResponsePage page_at(const std::string& url, std::string html) {
  ResponsePage p;
  p.status = 200;
  p.final_url = url;
  p.body = html;
  p.body_length = p.body.size();
  p.decoded_text = std::move(html);
  return p;
}

FormDescriptor simple_form() {
  FormDescriptor f;
  f.action_url = "http://h/login";
  f.method = "POST";
  f.params = {{"username", ""}, {"pwd", ""}};
  f.user_key = "username";
  f.pass_key = "pwd";
  return f;
}

int count_kind(const std::vector<AttemptRecord>& log, AttemptKind kind) {
  return static_cast<int>(
      std::count_if(log.begin(), log.end(),
                    [kind](const AttemptRecord& r) { return r.kind == kind; }));
}

}  // namespace

TEST_CASE("judge walks the three static steps in order") {
  auto form = simple_form();
  Baseline base{true, 1490, 2};
  const auto& bl = default_blacklist();

  auto s1 = judge(page_at("http://h/x", "<p>密码错误</p>"), base, form, bl);
  CHECK(s1.verdict == Verdict::RejectedStep1);
  REQUIRE(s1.matched_keyword);
  CHECK(*s1.matched_keyword == "密码错误");

  auto s2 = judge(page_at("http://h/x", "<input name=\"pwd\">"), base, form, bl);
  CHECK(s2.verdict == Verdict::RejectedStep2);
  CHECK(!s2.matched_keyword);

  std::string exactly_el(1490, 'x');
  auto s3 = judge(page_at("http://h/x", exactly_el), base, form, bl);
  CHECK(s3.verdict == Verdict::RejectedStep3);

  auto pass = judge(page_at("http://h/x", std::string(1920, 'x')), base, form, bl);
  CHECK(pass.verdict == Verdict::Candidate);
}

TEST_CASE("judge never passes a page whose length equals EL") {
  auto form = simple_form();
  Baseline base{true, 64, 2};
  const auto& bl = default_blacklist();
  for (int i = 0; i < 32; ++i) {
    std::string body(64, static_cast<char>('a' + i));
    CHECK(judge(page_at("http://h/x", body), base, form, bl).verdict !=
          Verdict::Candidate);
  }
}

TEST_CASE("judge EL tolerance widens the equality band") {
  auto form = simple_form();
  Baseline base{true, 100, 2};
  const auto& bl = default_blacklist();
  CHECK(judge(page_at("http://h/x", std::string(103, 'x')), base, form, bl, LengthMode::Body,
              0)
            .verdict == Verdict::Candidate);
  CHECK(judge(page_at("http://h/x", std::string(103, 'x')), base, form, bl, LengthMode::Body,
              5)
            .verdict == Verdict::RejectedStep3);
}

TEST_CASE("preprocess establishes stability and EL") {
  SUBCASE("stable page") {
    SimServer server(scenario_by_name("e2_error_original"));
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url());
    CHECK(result.outcome == Outcome::StrongNoFinding);
    const auto& log = engine.attempt_log();
    REQUIRE(count_kind(log, AttemptKind::Probe) == 2);
    std::vector<std::size_t> probe_lengths;
    for (const auto& r : log)
      if (r.kind == AttemptKind::Probe) probe_lengths.push_back(r.body_length);
    CHECK(probe_lengths[0] == probe_lengths[1]);
    CHECK(probe_lengths[0] == 900);  // the scenario's wrong-page template length
  }
  SUBCASE("unstable page aborts the target") {
    SimServer server(scenario_by_name("unstable_banner"));
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url());
    CHECK(result.outcome == Outcome::Unstable);
    CHECK(result.attempts == 0);
  }
}

TEST_CASE("blast finds the planted weak credentials") {
  SUBCASE("discuz-like: admin/admin888 at attempt 3") {
    SimServer server(scenario_by_name("discuz_like"));
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url());
    CHECK(result.outcome == Outcome::WeakPassword);
    REQUIRE(result.credential);
    CHECK(result.credential->username == "admin");
    CHECK(result.credential->password == "admin888");
    CHECK(result.attempts == 3);

    // the log records which step-2 route rejected the re-rendered login box
    bool step2_route_logged = false;
    for (const auto& r : engine.attempt_log())
      if (r.kind == AttemptKind::Dictionary &&
          r.detail.rfind("rejected_step2:attr", 0) == 0)
        step2_route_logged = true;
    CHECK(step2_route_logged);
  }
  SUBCASE("dedecms-like: admin/yzddmr6123 at attempt 30") {
    SimServer server(scenario_by_name("dedecms_like"));
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url());
    CHECK(result.outcome == Outcome::WeakPassword);
    REQUIRE(result.credential);
    CHECK(result.credential->password == "yzddmr6123");
    CHECK(result.attempts == 30);
  }
  SUBCASE("success prompt page (event 8) confirms as well") {
    SimServer server(scenario_by_name("e8_success_prompt"));
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url());
    CHECK(result.outcome == Outcome::WeakPassword);
    CHECK(result.events.back() == BlastEvent::E8);
  }
}

TEST_CASE("strong passwords yield no finding after 33 + 25 attempts") {
  SimServer server(scenario_by_name("discuz_strong"));
  Engine engine = make_engine();
  auto result = engine.blast(server.login_url());
  CHECK(result.outcome == Outcome::StrongNoFinding);
  CHECK(result.attempts == 58);
  const auto& log = engine.attempt_log();
  CHECK(count_kind(log, AttemptKind::Dictionary) == 33);
  CHECK(count_kind(log, AttemptKind::Universal) == 25);
}

TEST_CASE("universal module confirms SQLi tautologies") {
  SimServer server(scenario_by_name("sqli_vulnerable"));
  Engine engine = make_engine();
  auto result = engine.blast(server.login_url());
  CHECK(result.outcome == Outcome::UniversalPassword);
  REQUIRE(result.credential);
  CHECK(result.credential->origin == CredentialOrigin::Universal);
  CHECK(result.credential->username == "admin' or 'a'='a");
  CHECK(result.attempts == 34);  // 33 dictionary rejections, first payload pair hits

  SUBCASE("disabled module never sends payloads") {
    EngineConfig cfg = quick_config();
    cfg.universal_enabled = false;
    Engine no_uni(cfg, default_blacklist());
    auto r2 = no_uni.blast(server.login_url());
    CHECK(r2.outcome == Outcome::StrongNoFinding);
    CHECK(count_kind(no_uni.attempt_log(), AttemptKind::Universal) == 0);
  }
}

TEST_CASE("recheck confirms real candidates and rejects lockout pages") {
  SUBCASE("dedecms-like candidate is confirmed") {
    SimServer server(scenario_by_name("dedecms_like"));
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url());
    REQUIRE(result.outcome == Outcome::WeakPassword);
    const auto& log = engine.attempt_log();
    // recheck trail: pre-request, wrong probe at EL, candidate at a new length
    int n = static_cast<int>(log.size());
    REQUIRE(n >= 3);
    CHECK(log[n - 3].kind == AttemptKind::PreRequest);
    CHECK(log[n - 2].kind == AttemptKind::RecheckProbe);
    CHECK(log[n - 2].body_length == 1490);
    CHECK(log[n - 1].kind == AttemptKind::RecheckConfirm);
    CHECK(log[n - 1].body_length == 1920);
  }

  SUBCASE("equal-length lockout: ablation shows step 4 is load-bearing") {
    // with the recheck, no false positive
    {
      SimServer server(scenario_by_name("lockout_equal_length"));
      Engine engine = make_engine();
      auto result = engine.blast(server.login_url());
      CHECK(result.outcome == Outcome::StrongNoFinding);
    }
    // without it, the lockout page sails through steps 1-3
    {
      SimServer server(scenario_by_name("lockout_equal_length"));
      EngineConfig cfg = quick_config();
      cfg.recheck_enabled = false;
      Engine engine(cfg, default_blacklist());
      auto result = engine.blast(server.login_url());
      CHECK(result.outcome == Outcome::WeakPassword);  // the demonstrated false positive
    }
  }
}

TEST_CASE("interference scenarios never produce a success outcome") {
  for (const char* name : {"e1_silent_relogin", "e2_error_original",
                           "e3_max_attempts_original", "e4_error_redirect",
                           "e5_max_attempts_redirect", "e6_firewall_on_universal",
                           "e7_redirected_form", "lockout_equal_length",
                           "cookie_counter"}) {
    SimServer server(scenario_by_name(name));
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url());
    CHECK_MESSAGE(result.outcome != Outcome::WeakPassword, name);
    CHECK_MESSAGE(result.outcome != Outcome::UniversalPassword, name);
  }
}

TEST_CASE("classified events match the simulator's served ground truth") {
  for (const char* name : {"e1_silent_relogin", "e2_error_original", "e4_error_redirect",
                           "e6_firewall_on_universal", "e9_backend_entry", "discuz_like",
                           "dedecms_like"}) {
    SimServer server(scenario_by_name(name));
    Engine engine = make_engine();
    engine.blast(server.login_url());

    std::vector<BlastEvent> classified;
    for (const auto& r : engine.attempt_log())
      if (r.event) classified.push_back(*r.event);
    auto served = server.served_events();
    REQUIRE_MESSAGE(classified.size() == served.size(), name);
    for (size_t i = 0; i < served.size(); ++i)
      CHECK_MESSAGE(classified[i] == served[i], name, " submission ", i);
  }
}

TEST_CASE("no credential pair is ever submitted twice") {
  SimServer server(scenario_by_name("discuz_strong"));
  Engine engine = make_engine();
  engine.blast(server.login_url());

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : engine.attempt_log()) {
    if (r.kind != AttemptKind::Dictionary && r.kind != AttemptKind::Universal) continue;
    CHECK(seen.insert({r.username, r.password}).second);
  }
}

TEST_CASE("attempt accounting excludes pre-requests and probes") {
  SimServer server(scenario_by_name("discuz_like"));
  Engine engine = make_engine();
  auto result = engine.blast(server.login_url());
  const auto& log = engine.attempt_log();
  CHECK(result.attempts == count_kind(log, AttemptKind::Dictionary) +
                               count_kind(log, AttemptKind::Universal));
  CHECK(count_kind(log, AttemptKind::PreRequest) >= 1);
  CHECK(count_kind(log, AttemptKind::Probe) == 2);
}

TEST_CASE("analysis failures and unreachable targets map to their outcomes") {
  SUBCASE("not a login page") {
    Scenario sc = scenario_by_name("e1_silent_relogin");
    sc.name = "plain_page";
    sc.page_templates["login"] = "<html><body><p>Just a brochure.</p></body></html>";
    SimServer server(sc);
    Engine engine = make_engine();
    CHECK(engine.blast(server.login_url()).outcome == Outcome::AnalysisFailed);
  }
  SUBCASE("captcha page is skipped") {
    Scenario sc = scenario_by_name("e1_silent_relogin");
    sc.name = "with_captcha";
    sc.page_templates["login"] =
        "<html><body><form method=\"post\" action=\"\">"
        "<input name=\"username\"><input type=\"password\" name=\"pwd\">"
        "<input name=\"verifycode\"><input type=\"submit\" value=\"Login\">"
        "</form></body></html>";
    SimServer server(sc);
    Engine engine = make_engine();
    CHECK(engine.blast(server.login_url()).outcome == Outcome::Captcha);
  }
  SUBCASE("connection refused") {
    EngineConfig cfg = quick_config();
    cfg.session.timeout_seconds = 0.5;
    Engine engine(cfg, default_blacklist());
    CHECK(engine.blast("http://127.0.0.1:1/login").outcome == Outcome::Unreachable);
  }
}

TEST_CASE("custom rules steer the verdict") {
  SUBCASE("success_flag forces confirmation") {
    SimServer server(scenario_by_name("e9_backend_entry"));
    CmsRule rule;
    rule.name = "backend-rule";
    rule.keywords = "管理后台";  // matches the login page
    rule.success_flag = "Dashboard";
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url(), {rule});
    CHECK(result.outcome == Outcome::WeakPassword);
    CHECK(result.matched_rule == "backend-rule");
  }
  SUBCASE("fail_flag aborts the target") {
    SimServer server(scenario_by_name("e2_error_original"));
    CmsRule rule;
    rule.name = "bail-out";
    rule.keywords = "管理后台";
    rule.fail_flag = "密码错误";
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url(), {rule});
    CHECK(result.outcome == Outcome::StrongNoFinding);
    CHECK(result.attempts == 1);
    CHECK(result.note.find("bail-out") != std::string::npos);
  }
  SUBCASE("captcha flag skips before any submission") {
    SimServer server(scenario_by_name("e2_error_original"));
    CmsRule rule;
    rule.name = "captcha-cms";
    rule.keywords = "管理后台";
    rule.captcha = 1;
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url(), {rule});
    CHECK(result.outcome == Outcome::Captcha);
    CHECK(result.attempts == 0);
  }
  SUBCASE("exp_able=0 suppresses the universal round") {
    SimServer server(scenario_by_name("sqli_vulnerable"));
    CmsRule rule;
    rule.name = "no-exp";
    rule.keywords = "管理后台";
    rule.exp_able = 0;
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url(), {rule});
    CHECK(result.outcome == Outcome::StrongNoFinding);
  }
  SUBCASE("alert=1 surfaces the rule note") {
    SimServer server(scenario_by_name("e2_error_original"));
    CmsRule rule;
    rule.name = "alerting";
    rule.keywords = "管理后台";
    rule.alert = 1;
    rule.note = "handle with care";
    Engine engine = make_engine();
    auto result = engine.blast(server.login_url(), {rule});
    CHECK(result.note == "handle with care");
  }
}

TEST_CASE("password-only panels are blasted with an empty user key") {
  Scenario sc = scenario_by_name("e2_error_original");
  sc.name = "password_only";
  sc.user_field = "";
  sc.pass_field = "mima";
  sc.valid_credential = {{"", "123456"}};
  sc.page_templates["login"] =
      "<html><head><title>门禁登录</title></head><body>"
      "<form method=\"post\" action=\"\">"
      "<input type=\"password\" name=\"mima\">"
      "<input type=\"submit\" value=\"登录\"></form></body></html>";
  SimServer server(sc);

  Engine engine = make_engine();
  auto result = engine.blast(server.login_url());
  CHECK(result.outcome == Outcome::WeakPassword);
  REQUIRE(result.credential);
  CHECK(result.credential->password == "123456");
  CHECK(result.attempts == 2);  // dictionary position of 123456
}

TEST_CASE("PCFG round finds corpus-shaped passwords after the dictionaries") {
  Scenario sc = scenario_by_name("e9_backend_entry");
  sc.name = "pcfg_target";
  sc.valid_credential = {{"admin", "zq7x1"}};
  SimServer server(sc);

  EngineConfig cfg = quick_config();
  cfg.grammar = train_pcfg({"zq7x1", "zq7x2", "aa1b2"});
  cfg.pcfg_guess_limit = 50;
  Engine engine(cfg, default_blacklist());
  auto result = engine.blast(server.login_url());
  CHECK(result.outcome == Outcome::WeakPassword);
  REQUIRE(result.credential);
  CHECK(result.credential->password == "zq7x1");
  CHECK(result.credential->origin == CredentialOrigin::Pcfg);
}

TEST_CASE("obfuscated failures trigger the username probe, then a replay") {
  Scenario sc = scenario_by_name("e2_error_original");
  sc.name = "obfuscated_probe";
  sc.valid_credential = {{"sysop", "sysop888"}};
  sc.hash_delay_ms_per_char = 0.5;
  sc.existing_users = {"sysop"};
  sc.page_templates["wrong"] =
      "<html><head><title>提示信息</title></head><body>"
      "<p>Username or password is incorrect.</p></body></html>";
  SimServer server(sc);

  EngineConfig cfg = quick_config();
  cfg.grammar = train_pcfg({"qqqq1"});  // the grammar round itself finds nothing
  cfg.pcfg_guess_limit = 5;
  cfg.probe_candidates = {"admin", "ghost", "sysop"};
  cfg.probe.rounds = 3;
  cfg.probe.long_password_length = 512;
  Engine engine(cfg, default_blacklist());

  auto result = engine.blast(server.login_url());
  CHECK(result.outcome == Outcome::WeakPassword);
  REQUIRE(result.credential);
  CHECK(result.credential->username == "sysop");
  CHECK(result.credential->password == "sysop888");

  REQUIRE(engine.probe_report());
  CHECK(engine.probe_report()->confirmed == "sysop");

  // probe submissions are excluded from dictionary accounting
  const auto& log = engine.attempt_log();
  CHECK(count_kind(log, AttemptKind::TimingProbe) == 9);
  CHECK(result.attempts == count_kind(log, AttemptKind::Dictionary) +
                               count_kind(log, AttemptKind::Universal));
}

TEST_CASE("total length mode includes header bytes in the comparison") {
  SimServer server(scenario_by_name("discuz_like"));
  EngineConfig cfg = quick_config();
  cfg.length_mode = LengthMode::Total;
  Engine engine(cfg, default_blacklist());
  auto result = engine.blast(server.login_url());
  // headers are stable across the simulator's identical pages, so the
  // verdict is unchanged under the total metric
  CHECK(result.outcome == Outcome::WeakPassword);
  CHECK(result.credential->password == "admin888");
}
