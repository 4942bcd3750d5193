#ifndef CREDAUDIT_DICTIONARIES_HPP
#define CREDAUDIT_DICTIONARIES_HPP

#include <optional>
#include <string>
#include <vector>

#include "credaudit/events.hpp"
#include "credaudit/pcfg.hpp"

namespace credaudit {

enum class CredentialOrigin { General, Dynamic, Pcfg, Universal, Hint };

std::string to_string(CredentialOrigin o);

struct Credential {
  std::string username;
  std::string password;
  CredentialOrigin origin = CredentialOrigin::General;
};

/// Custom judgment rule, field names bit-exact with the rules file format.
struct CmsRule {
  std::string name;
  std::string keywords;  // '|'-separated substrings matched on the login page
  int captcha = 0;
  int exp_able = 1;
  std::string success_flag;
  std::string fail_flag;
  int alert = 0;
  std::string note;
};

std::vector<CmsRule> load_rules(const std::string& path);
std::vector<CmsRule> rules_from_json(const std::string& json_text);

/// First rule whose keywords match the page text (case-insensitive), if any.
const CmsRule* match_rule(const std::vector<CmsRule>& rules, const std::string& page_text);

/// The shipped default dictionary: the fixed built-in list plus
/// username-derived slots (bare, 888, 123, 123456, 666, 2018) at their
/// canonical positions. Empty username drops the derived slots.
std::vector<Credential> general_dict(const std::string& username);

/// Domain-derived passwords: full registrable domain first, then each
/// meaningful host label bare and with every configured suffix. IP-literal,
/// single-label and bare-public-suffix hosts yield nothing.
std::vector<std::string> dynamic_dict(const std::string& target_url,
                                      const std::vector<std::string>& suffixes = {
                                          "123", "888", "666", "123456"});

const std::vector<std::string>& universal_payloads();  // the 5 injection strings

/// Full 5x5 cross product of the injection payloads as (username, password)
/// pairs; empty when the matched rule disables the universal module.
std::vector<Credential> universal_dict(const CmsRule* rule);

/// Result of hint-driven adjustment: a re-sorted guess stream that never
/// re-emits attempted passwords, plus a signal that the engine should run the
/// username prober before continuing (raised when a failure cause said the
/// username does not exist).
struct AdjustedDictionary {
  GuessStream stream;
  bool request_username_probe = false;
};

AdjustedDictionary adjust_dictionary(const PcfgGrammar& grammar, const HintSet& hints,
                                     const std::vector<AttemptRecord>& history,
                                     double hint_boost = 0.5);

/// Registrable domain of a host ("webcrack.yzddmr6.com" -> "yzddmr6.com"),
/// or nullopt for IP literals, single labels and bare public suffixes.
std::optional<std::string> registrable_domain(const std::string& host);

}  // namespace credaudit

#endif
