#include "credaudit/events.hpp"

#include <algorithm>
#include <cctype>

#include "credaudit/engine.hpp"

namespace credaudit {
namespace {

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

bool is_word_char(unsigned char c) { return std::isalnum(c) || c == '_'; }

std::string extract_title(const std::string& text) {
  std::string low = ascii_lower(text);
  auto start = low.find("<title");
  if (start == std::string::npos) return {};
  start = low.find('>', start);
  if (start == std::string::npos) return {};
  auto end = low.find("</title", start);
  if (end == std::string::npos) return {};
  return text.substr(start + 1, end - start - 1);
}

const std::vector<std::string>& hint_stopwords() {
  static const std::vector<std::string> words = {
      "admin", "login", "system", "page",     "user",  "password", "username",
      "sign",  "panel", "portal", "backend",  "index", "error",    "the",
      "and",   "for",   "please", "incorrect"};
  return words;
}

bool is_stopword(const std::string& lower_word) {
  const auto& sw = hint_stopwords();
  return std::find(sw.begin(), sw.end(), lower_word) != sw.end();
}

}  // namespace

std::string to_string(BlastEvent e) { return "E" + std::to_string(static_cast<int>(e)); }

std::string to_string(AttemptKind k) {
  switch (k) {
    case AttemptKind::PreRequest: return "pre_request";
    case AttemptKind::Probe: return "probe";
    case AttemptKind::Dictionary: return "dictionary";
    case AttemptKind::Universal: return "universal";
    case AttemptKind::TimingProbe: return "timing_probe";
    case AttemptKind::RecheckProbe: return "recheck_probe";
    case AttemptKind::RecheckConfirm: return "recheck_confirm";
  }
  return "?";
}

std::string to_string(FailureCauseKind k) {
  switch (k) {
    case FailureCauseKind::UsernameNonexistent: return "username_nonexistent";
    case FailureCauseKind::PasswordError: return "password_error";
    case FailureCauseKind::MaxAttemptsExceeded: return "max_attempts_exceeded";
    case FailureCauseKind::FirewallBlocked: return "firewall_blocked";
    case FailureCauseKind::Other: return "other";
  }
  return "?";
}

void HintSet::add(const std::string& keyword, HintSource source) {
  if (keyword.empty() || contains(keyword)) return;
  entries.push_back({keyword, source});
}

bool HintSet::contains(const std::string& keyword) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const Entry& e) { return e.keyword == keyword; });
}

std::vector<std::string> HintSet::keywords() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.keyword);
  return out;
}

std::string attempt_log_header() {
  return "timestamp,target,kind,username,password,event,body_length,detail";
}

std::string to_csv_line(const AttemptRecord& r) {
  std::string out;
  out += csv_escape(r.timestamp);
  out += ',';
  out += csv_escape(r.target);
  out += ',';
  out += to_string(r.kind);
  out += ',';
  out += csv_escape(r.username);
  out += ',';
  out += csv_escape(r.password);
  out += ',';
  out += r.event ? to_string(*r.event) : "-";
  out += ',';
  out += std::to_string(r.body_length);
  out += ',';
  out += csv_escape(r.detail);
  return out;
}

KeyPresence check_login_keys(const std::string& decoded_text, const FormDescriptor& form) {
  KeyPresence p;
  std::string low = ascii_lower(decoded_text);
  std::vector<std::string> keys;
  if (!form.user_key.empty()) keys.push_back(ascii_lower(form.user_key));
  if (!form.pass_key.empty()) keys.push_back(ascii_lower(form.pass_key));
  for (const auto& key : keys) {
    for (const char* pattern : {"name=\"%\"", "name='%'", "name=%"}) {
      std::string needle(pattern);
      needle.replace(needle.find('%'), 1, key);
      if (contains(low, needle)) p.attribute_hit = true;
    }
    if (contains(low, key)) p.substring_hit = true;
  }
  return p;
}

BlastEvent classify_event(AttemptKind kind, const ResponsePage& page, const Baseline& baseline,
                          const FormDescriptor& form, const Blacklist& blacklist,
                          const std::string& login_url) {
  if (!baseline.stable) return BlastEvent::Other;

  const bool original = same_url(page.final_url, login_url) ||
                        same_url(page.final_url, form.action_url);
  const std::string text = ascii_lower(page.decoded_text);
  const bool wrong_kw = blacklist.matches_any(blacklist.wrong_password, text);
  const bool max_kw = blacklist.matches_any(blacklist.max_attempts, text);
  const bool firewall_kw = blacklist.matches_any(blacklist.firewall, text);
  const bool success_kw = blacklist.matches_any(blacklist.success, text);
  const bool keys = check_login_keys(page.decoded_text, form).any();

  if (original) {
    if (max_kw) return BlastEvent::E3;
    if (wrong_kw) return BlastEvent::E2;
    if (!firewall_kw && !success_kw && keys) return BlastEvent::E1;
    return BlastEvent::Other;
  }

  if (kind == AttemptKind::Universal && firewall_kw) return BlastEvent::E6;
  if (max_kw) return BlastEvent::E5;
  if (wrong_kw) return BlastEvent::E4;
  if (firewall_kw) return BlastEvent::Other;
  if (success_kw && !keys) return BlastEvent::E8;
  if (!keys) return BlastEvent::E9;  // backend page: no login box, no prompts
  return BlastEvent::Other;
}

FailureCause failure_cause(const ResponsePage& page, const Blacklist& blacklist) {
  FailureCause out;
  const std::string text = ascii_lower(page.decoded_text);
  if (blacklist.matches_any(blacklist.firewall, text)) {
    out.cause = FailureCauseKind::FirewallBlocked;
  } else if (blacklist.matches_any(blacklist.max_attempts, text)) {
    out.cause = FailureCauseKind::MaxAttemptsExceeded;
  } else if (blacklist.matches_any(blacklist.username_missing, text)) {
    out.cause = FailureCauseKind::UsernameNonexistent;
  } else if (blacklist.matches_any(blacklist.wrong_password, text)) {
    out.cause = FailureCauseKind::PasswordError;
  } else {
    out.cause = FailureCauseKind::Other;
  }
  out.hints = scrape_page_hints(page.decoded_text);
  return out;
}

std::vector<std::string> scrape_page_hints(const std::string& decoded_text) {
  std::vector<std::string> hints;
  auto push = [&](std::string word) {
    std::string low = ascii_lower(word);
    if (low.size() < 3 || low.size() > 24 || is_stopword(low)) return;
    if (std::find(hints.begin(), hints.end(), low) == hints.end()) hints.push_back(low);
  };

  // strip tags so markup names do not become hints
  std::string text;
  bool in_tag = false;
  for (char c : decoded_text) {
    if (c == '<') in_tag = true;
    else if (c == '>') in_tag = false;
    else if (!in_tag) text += c;
  }

  size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    if (c == '"' || c == '\'') {
      size_t end = text.find(c, i + 1);
      if (end != std::string::npos && end - i - 1 >= 3 && end - i - 1 <= 24) {
        std::string quoted = text.substr(i + 1, end - i - 1);
        if (std::all_of(quoted.begin(), quoted.end(),
                        [](unsigned char ch) { return is_word_char(ch); }))
          push(quoted);
        i = end + 1;
        continue;
      }
    }
    if (std::isalpha(c)) {
      size_t j = i;
      while (j < text.size() && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
      std::string word = text.substr(i, j - i);
      bool capitalized = std::isupper(c) != 0;
      bool all_caps = std::all_of(word.begin(), word.end(), [](unsigned char ch) {
        return !std::isalpha(ch) || std::isupper(ch);
      });
      if (capitalized || all_caps) push(word);
      i = j;
      continue;
    }
    ++i;
  }
  return hints;
}

HintSet collect_hints(const ResponsePage& login_page, const std::vector<FailureCause>& failures,
                      const std::vector<std::string>& prior_success_usernames) {
  HintSet set;

  std::string title = extract_title(login_page.decoded_text);
  size_t i = 0;
  while (i < title.size()) {
    if (std::isalpha(static_cast<unsigned char>(title[i]))) {
      size_t j = i;
      while (j < title.size() && std::isalpha(static_cast<unsigned char>(title[j]))) ++j;
      std::string word = ascii_lower(title.substr(i, j - i));
      if (word.size() >= 3 && !is_stopword(word)) set.add(word, HintSource::LoginPage);
      i = j;
    } else {
      ++i;
    }
  }

  if (auto url = parse_url(login_page.final_url); url && !is_ipv4_literal(url->host)) {
    size_t pos = 0;
    const std::string& host = url->host;
    while (pos < host.size()) {
      auto dot = host.find('.', pos);
      std::string label = host.substr(pos, dot == std::string::npos ? std::string::npos
                                                                    : dot - pos);
      if (label.size() >= 3 && !is_stopword(label) && label != "www" && label != "com" &&
          label != "net" && label != "org")
        set.add(label, HintSource::LoginPage);
      if (dot == std::string::npos) break;
      pos = dot + 1;
    }
  }

  for (const auto& f : failures)
    for (const auto& h : f.hints) set.add(h, HintSource::FailurePage);

  for (const auto& u : prior_success_usernames) set.add(u, HintSource::SuccessHistory);
  return set;
}

}  // namespace credaudit
