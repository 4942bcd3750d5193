#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "credaudit/engine.hpp"
#include "credaudit/events.hpp"

using namespace credaudit;

namespace {

const std::string kLoginUrl = "http://h/login";

ResponsePage page_at(const std::string& url, std::string html) {
  ResponsePage p;
  p.status = 200;
  p.final_url = url;
  p.body = html;
  p.body_length = p.body.size();
  p.decoded_text = std::move(html);
  return p;
}

FormDescriptor login_form() {
  FormDescriptor f;
  f.action_url = kLoginUrl;
  f.method = "POST";
  f.params = {{"username", ""}, {"pwd", ""}};
  f.user_key = "username";
  f.pass_key = "pwd";
  return f;
}

Baseline stable_baseline(std::size_t el = 1490) { return {true, el, 2}; }

const char* kFormHtml =
    "<form><input type=\"text\" name=\"username\">"
    "<input type=\"password\" name=\"pwd\"></form>";

}  // namespace

TEST_CASE("classify_event covers the nine presentations") {
  auto form = login_form();
  auto base = stable_baseline();
  const auto& bl = default_blacklist();
  auto classify = [&](AttemptKind kind, const ResponsePage& page) {
    return classify_event(kind, page, base, form, bl, kLoginUrl);
  };

  // E1: wrong password, original page, no prompt, login box persists
  CHECK(classify(AttemptKind::Dictionary, page_at(kLoginUrl, kFormHtml)) == BlastEvent::E1);
  // E2: original page, password-error prompt
  CHECK(classify(AttemptKind::Dictionary, page_at(kLoginUrl, "<p>密码错误</p>")) ==
        BlastEvent::E2);
  // E3: original page, max-attempts prompt
  CHECK(classify(AttemptKind::Dictionary,
                 page_at(kLoginUrl, "<p>Exceed the maximum number of attempts</p>")) ==
        BlastEvent::E3);
  // E4: new page, password-error prompt
  CHECK(classify(AttemptKind::Dictionary, page_at("http://h/err", "<p>密码错误</p>")) ==
        BlastEvent::E4);
  // E5: new page, max-attempts prompt
  CHECK(classify(AttemptKind::Dictionary,
                 page_at("http://h/blocked", "<p>错误次数过多</p>")) == BlastEvent::E5);
  // E6: universal input, new page, firewall page
  CHECK(classify(AttemptKind::Universal,
                 page_at("http://h/fw", "<p>请求已被防火墙拦截</p>")) == BlastEvent::E6);
  // the same firewall page on a dictionary attempt is not E6
  CHECK(classify(AttemptKind::Dictionary,
                 page_at("http://h/fw", "<p>请求已被防火墙拦截</p>")) == BlastEvent::Other);
  // E7/Other: new page that still shows the login box
  CHECK(classify(AttemptKind::Dictionary, page_at("http://h/relogin", kFormHtml)) ==
        BlastEvent::Other);
  // E8: new page, success prompt
  CHECK(classify(AttemptKind::Dictionary, page_at("http://h/ok", "<p>登录成功</p>")) ==
        BlastEvent::E8);
  // E9: new page, no keys, no prompts: the backend
  CHECK(classify(AttemptKind::Dictionary,
                 page_at("http://h/admin", "<h1>Dashboard</h1>")) == BlastEvent::E9);
}

TEST_CASE("classify_event totality and unstable guard") {
  auto form = login_form();
  const auto& bl = default_blacklist();
  Baseline unstable{false, 0, -1};
  CHECK(classify_event(AttemptKind::Dictionary, page_at(kLoginUrl, "x"), unstable, form, bl,
                       kLoginUrl) == BlastEvent::Other);
  // original page with an unclassifiable body still yields a value
  CHECK(classify_event(AttemptKind::Dictionary, page_at(kLoginUrl, "<p>/dev/null</p>"),
                       stable_baseline(), form, bl, kLoginUrl) == BlastEvent::Other);
}

TEST_CASE("failure_cause follows the priority order") {
  const auto& bl = default_blacklist();
  auto cause = [&](const std::string& text) {
    return failure_cause(page_at("http://h/x", text), bl).cause;
  };
  CHECK(cause("the username does not exist") == FailureCauseKind::UsernameNonexistent);
  CHECK(cause("Exceed the maximum number of password errors") ==
        FailureCauseKind::MaxAttemptsExceeded);
  CHECK(cause("密码错误") == FailureCauseKind::PasswordError);
  CHECK(cause("request blocked by firewall") == FailureCauseKind::FirewallBlocked);
  // a page with both firewall and password keywords is always FirewallBlocked
  CHECK(cause("密码错误 blocked by firewall") == FailureCauseKind::FirewallBlocked);
  // the obfuscating prompt belongs to the username category
  CHECK(cause("用户名或密码错误") == FailureCauseKind::UsernameNonexistent);
  CHECK(cause("nothing to see") == FailureCauseKind::Other);
}

TEST_CASE("scrape_page_hints pulls names, not markup") {
  auto hints = scrape_page_hints(
      "<div class=\"IgnoredClass\">Welcome to Initech Industries. "
      "Contact 'bmadison' for access.</div>");
  CHECK(std::find(hints.begin(), hints.end(), "initech") != hints.end());
  CHECK(std::find(hints.begin(), hints.end(), "industries") != hints.end());
  CHECK(std::find(hints.begin(), hints.end(), "bmadison") != hints.end());
  CHECK(std::find(hints.begin(), hints.end(), "ignoredclass") == hints.end());
}

TEST_CASE("collect_hints merges title, host labels, failures and history") {
  auto login = page_at("http://portal.initech.com/login",
                       "<html><head><title>Acme Corp Admin</title></head></html>");
  FailureCause fc;
  fc.hints = {"gateway"};
  HintSet set = collect_hints(login, {fc}, {"acmeops"});

  CHECK(set.contains("acme"));
  CHECK(set.contains("corp"));
  CHECK(set.contains("initech"));  // host label
  CHECK(set.contains("gateway"));
  CHECK(set.contains("acmeops"));

  bool history_tagged = false;
  for (const auto& e : set.entries)
    if (e.keyword == "acmeops" && e.source == HintSource::SuccessHistory)
      history_tagged = true;
  CHECK(history_tagged);

  // dedup is order-preserving
  HintSet dedup;
  dedup.add("one", HintSource::LoginPage);
  dedup.add("two", HintSource::FailurePage);
  dedup.add("one", HintSource::SuccessHistory);
  REQUIRE(dedup.entries.size() == 2);
  CHECK(dedup.entries[0].keyword == "one");
  CHECK(dedup.entries[0].source == HintSource::LoginPage);

  HintSet empty = collect_hints(page_at("http://1.2.3.4/login", "<html></html>"), {}, {});
  CHECK(empty.empty());
}

TEST_CASE("check_login_keys reports attribute and substring routes") {
  auto form = login_form();
  auto attr = check_login_keys("<input name=\"username\">", form);
  CHECK(attr.attribute_hit);
  CHECK(attr.substring_hit);

  auto substr = check_login_keys("your username was rejected", form);
  CHECK(!substr.attribute_hit);
  CHECK(substr.substring_hit);

  auto none = check_login_keys("<h1>Dashboard</h1>", form);
  CHECK(!none.any());

  auto unquoted = check_login_keys("<input name=pwd>", form);
  CHECK(unquoted.attribute_hit);
}

TEST_CASE("attempt log CSV escapes quotes and commas") {
  AttemptRecord rec;
  rec.timestamp = "2024-01-01T00:00:00Z";
  rec.target = "http://h/login";
  rec.kind = AttemptKind::Universal;
  rec.username = "admin' or 'a'='a";
  rec.password = "a,b\"c";
  rec.event = BlastEvent::E6;
  rec.body_length = 42;
  rec.detail = "rejected_step1:firewall";
  CHECK(to_csv_line(rec) ==
        "2024-01-01T00:00:00Z,http://h/login,universal,admin' or 'a'='a,\"a,b\"\"c\",E6,42,"
        "rejected_step1:firewall");

  AttemptRecord pre;
  pre.timestamp = "t";
  pre.target = "u";
  pre.kind = AttemptKind::PreRequest;
  CHECK(to_csv_line(pre) == "t,u,pre_request,,,-,0,");
}

TEST_CASE("the shipped data files parse and mirror the built-ins") {
  auto shipped = load_blacklist(CREDAUDIT_DATA_DIR "/blacklist.json", false);
  auto builtin = default_blacklist();
  CHECK(shipped.wrong_password == builtin.wrong_password);
  CHECK(shipped.max_attempts == builtin.max_attempts);
  CHECK(shipped.firewall == builtin.firewall);
  CHECK(shipped.username_missing == builtin.username_missing);
  CHECK(shipped.success == builtin.success);
}

TEST_CASE("blacklist JSON loading extends or replaces the defaults") {
  const char* path = "test_blacklist_tmp.json";
  {
    std::ofstream out(path);
    out << R"({"wrong_password": ["zugriff verweigert"], "success": ["willkommen"]})";
  }
  auto extended = load_blacklist(path, true);
  CHECK(extended.matches_any(extended.wrong_password, "zugriff verweigert"));
  CHECK(extended.matches_any(extended.wrong_password, "密码错误"));

  auto replaced = load_blacklist(path, false);
  CHECK(replaced.matches_any(replaced.wrong_password, "zugriff verweigert"));
  CHECK(!replaced.matches_any(replaced.wrong_password, "密码错误"));

  {
    std::ofstream out(path);
    out << R"({"unknown_list": []})";
  }
  CHECK_THROWS(load_blacklist(path));
  std::remove(path);
}
