#ifndef CREDAUDIT_BLACKLIST_HPP
#define CREDAUDIT_BLACKLIST_HPP

#include <optional>
#include <string>
#include <vector>

namespace credaudit {

/// Keyword lists driving judgment step 1 and failure-cause discrimination.
/// Completeness of these lists is the main lever on the false-positive rate,
/// so they are data, not code: ship defaults here, extend via JSON file.
struct Blacklist {
  std::vector<std::string> wrong_password;
  std::vector<std::string> max_attempts;
  std::vector<std::string> firewall;
  std::vector<std::string> username_missing;
  std::vector<std::string> success;

  /// First blacklist keyword (wrong-password, max-attempts, firewall lists)
  /// found in `text_lower`, or nullopt. Matching is case-insensitive on the
  /// caller side: pass lowercased text.
  std::optional<std::string> match_failure_keyword(const std::string& text_lower) const;

  bool matches_any(const std::vector<std::string>& list,
                   const std::string& text_lower) const;
};

Blacklist default_blacklist();

/// Loads keyword lists from a JSON object of string arrays
/// ({"wrong_password": [...], "max_attempts": [...], "firewall": [...],
///   "username_missing": [...], "success": [...]}).
/// Unknown keys are rejected. When `extend` is true the file adds to the
/// built-in defaults instead of replacing them.
Blacklist load_blacklist(const std::string& path, bool extend = true);

std::string ascii_lower(std::string_view text);

}  // namespace credaudit

#endif
