#ifndef CREDAUDIT_SIMULATOR_HPP
#define CREDAUDIT_SIMULATOR_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "credaudit/engine.hpp"
#include "credaudit/events.hpp"

namespace credaudit {

/// Which event presentation each input class triggers.
struct EventProfile {
  BlastEvent wrong = BlastEvent::E1;
  BlastEvent correct = BlastEvent::E9;
  BlastEvent universal = BlastEvent::E1;  // E6 = firewall blocking page
};

/// A scripted login service. Page templates are keyed by role (login, wrong,
/// max_attempts, firewall, success, backend, relogin, blocked); target_lengths
/// pins the exact byte count of a role's body after padding and charset
/// encoding. Distinct roles get distinct lengths so EL discrimination is
/// exercisable, except where a scenario deliberately tests the equal-length
/// lockout.
struct Scenario {
  std::string name;
  EventProfile profile;
  std::optional<std::pair<std::string, std::string>> valid_credential;
  std::optional<int> lockout_threshold;
  BlastEvent lockout_event = BlastEvent::E3;  // presentation once locked
  bool sqli_vulnerable = false;
  std::optional<double> hash_delay_ms_per_char;
  std::vector<std::string> existing_users;
  bool unstable = false;
  bool cookie_on_first = false;
  bool issue_cookies = true;  // false: never send Set-Cookie

  std::string user_field = "username";
  std::string pass_field = "password";
  std::string form_action;      // relative to /login; empty = self-submission
  std::string required_token;   // hidden CSRF field the POST must echo
  std::string charset = "utf-8";  // or gb2312: bodies are iconv-encoded
  double jitter_ms_max = 0;     // uniform extra latency, seeded per spawn
  std::uint64_t jitter_seed = 1;

  std::map<std::string, std::string> page_templates;  // role -> HTML
  std::map<std::string, std::size_t> target_lengths;  // role -> exact bytes

  // ground truth for tests and the scenario catalog
  Outcome expected_outcome = Outcome::StrongNoFinding;
  std::optional<std::pair<std::string, std::string>> expected_credential;
  std::string planted_user;  // timing scenarios: the account that exists

  /// Fills in default templates for any role not explicitly provided.
  void materialize_templates();
};

class spawn_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One running simulator endpoint: login page at /login, backend at /admin.
/// State (session cookies, lockout counters, served-event trace) is
/// per-instance; concurrent spawns on distinct ports do not interact.
class SimServer {
 public:
  explicit SimServer(Scenario scenario, int port = 0);  // 0 = pick a free port
  ~SimServer();
  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  int port() const;
  std::string base_url() const;
  std::string login_url() const;
  const Scenario& scenario() const;

  /// Ground truth: the event presentation chosen for each POST, in order.
  std::vector<BlastEvent> served_events() const;
  void clear_events();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Canonical scenarios: one per event E1-E9 plus unstable, cookie-counter,
/// sqli-vulnerable, timing, equal-length lockout, the DedeCMS/Discuz trace
/// replicas and their strong-password variants.
std::vector<Scenario> scenario_catalog();
Scenario scenario_by_name(const std::string& name);

std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& json_text);
Scenario load_scenario(const std::string& path);

std::optional<BlastEvent> event_from_string(const std::string& name);

/// True when the input matches a SQL tautology pattern (the universal
/// payload shapes).
bool looks_like_injection(const std::string& value);

}  // namespace credaudit

#endif
