#ifndef CREDAUDIT_EVENTS_HPP
#define CREDAUDIT_EVENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "credaudit/blacklist.hpp"
#include "credaudit/http_session.hpp"
#include "credaudit/page_analyzer.hpp"

namespace credaudit {

struct Baseline;

/// The nine blasting response events. Events 1-7 are interference, 8-9 are
/// success presentations. Event 7 is the catch-all; Other is its alias.
enum class BlastEvent : int {
  E1 = 1,  // wrong password, original page, no prompt
  E2 = 2,  // wrong password, original page, password-error prompt
  E3 = 3,  // wrong password, original page, max-attempts prompt
  E4 = 4,  // wrong password, new page, password-error prompt
  E5 = 5,  // wrong password, new page, max-attempts prompt
  E6 = 6,  // universal password, new page, firewall blocking page
  E7 = 7,
  Other = 7,
  E8 = 8,  // correct password, new page, password-correct prompt
  E9 = 9,  // correct password, new page, backend reached
};

std::string to_string(BlastEvent e);

enum class AttemptKind {
  PreRequest,
  Probe,          // preprocessing wrong-password probe
  Dictionary,     // general / dynamic / PCFG / hint credential
  Universal,      // injection payload pair
  TimingProbe,    // username-prober submission
  RecheckProbe,   // recheck wrong password e1
  RecheckConfirm  // recheck resubmission of the candidate s
};

std::string to_string(AttemptKind k);

enum class FailureCauseKind {
  UsernameNonexistent,
  PasswordError,
  MaxAttemptsExceeded,
  FirewallBlocked,
  Other
};

std::string to_string(FailureCauseKind k);

struct FailureCause {
  FailureCauseKind cause = FailureCauseKind::Other;
  std::vector<std::string> hints;  // keywords scraped from the failure page
};

enum class HintSource { LoginPage, FailurePage, SuccessHistory };

/// Ordered, deduplicated hint keywords with their provenance.
struct HintSet {
  struct Entry {
    std::string keyword;
    HintSource source;
  };
  std::vector<Entry> entries;

  void add(const std::string& keyword, HintSource source);
  bool contains(const std::string& keyword) const;
  std::vector<std::string> keywords() const;
  bool empty() const { return entries.empty(); }
};

/// One row of the attempt log (CSV columns in this order). Events are only
/// assigned to credential submissions; pre-requests and timing probes carry
/// none. `detail` records the judgment verdict, including which step-2
/// route (attribute or substring) fired.
struct AttemptRecord {
  std::string timestamp;
  std::string target;
  AttemptKind kind = AttemptKind::Dictionary;
  std::string username;
  std::string password;
  std::optional<BlastEvent> event;
  std::optional<FailureCauseKind> cause;
  std::size_t body_length = 0;
  std::string detail;
};

std::string attempt_log_header();
std::string to_csv_line(const AttemptRecord& record);

/// Step-2 style key search: attribute-aware (name="key" inside a tag) with a
/// raw substring fallback. Both routes are reported so callers can log which
/// one fired.
struct KeyPresence {
  bool attribute_hit = false;
  bool substring_hit = false;
  bool any() const { return attribute_hit || substring_hit; }
};

KeyPresence check_login_keys(const std::string& decoded_text, const FormDescriptor& form);

/// Decision tree over the observables: original vs new page (final position
/// after redirects), prompt class from the keyword lists, and login-key
/// presence. Unresolvable combinations map to Other.
BlastEvent classify_event(AttemptKind kind, const ResponsePage& page, const Baseline& baseline,
                          const FormDescriptor& form, const Blacklist& blacklist,
                          const std::string& login_url);

/// Keyword rules in priority order firewall > max-attempts >
/// username-nonexistent > password-error; unmatched pages yield Other with
/// whatever hints could be scraped.
FailureCause failure_cause(const ResponsePage& page, const Blacklist& blacklist);

/// Merges login-page features (title words, host labels), failure-page hints
/// and usernames from earlier successes in the batch.
HintSet collect_hints(const ResponsePage& login_page, const std::vector<FailureCause>& failures,
                      const std::vector<std::string>& prior_success_usernames);

/// Token scrape used for failure pages: capitalized words, quoted names and
/// organization-looking strings.
std::vector<std::string> scrape_page_hints(const std::string& decoded_text);

}  // namespace credaudit

#endif
