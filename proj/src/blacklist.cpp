#include "credaudit/blacklist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace credaudit {

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool Blacklist::matches_any(const std::vector<std::string>& list,
                            const std::string& text_lower) const {
  for (const auto& kw : list)
    if (text_lower.find(ascii_lower(kw)) != std::string::npos) return true;
  return false;
}

std::optional<std::string> Blacklist::match_failure_keyword(
    const std::string& text_lower) const {
  for (const auto* list : {&wrong_password, &max_attempts, &firewall}) {
    for (const auto& kw : *list)
      if (text_lower.find(ascii_lower(kw)) != std::string::npos) return kw;
  }
  return std::nullopt;
}

Blacklist default_blacklist() {
  Blacklist b;
  b.wrong_password = {
      "密码错误",       "密码不正确",     "密码有误",      "帐号或密码错误",
      "账号或密码错误", "用户名或密码",   "密码输入错误",  "登录失败",
      "验证失败",       "password error", "password is incorrect",
      "incorrect password", "wrong password", "invalid password",
      "invalid username", "login failed", "login error",
      "username or password",
  };
  b.max_attempts = {
      "超过最大",   "次数过多",     "错误次数",       "尝试次数",
      "已被锁定",   "帐号已锁定",   "账号已锁定",     "稍后再试",
      "too many attempts", "too many failed", "maximum number",
      "exceed the maximum", "account locked", "account is locked",
      "temporarily locked", "retry later",
  };
  b.firewall = {
      "防火墙",     "已被拦截",   "恶意访问",     "非法请求",
      "攻击行为",   "安全狗",     "云锁",         "创宇盾",
      "firewall",   "blocked by", "request blocked", "access denied",
      "waf",        "attack detected", "malicious request",
      "security check failed",
  };
  b.username_missing = {
      "用户不存在",     "用户名不存在",   "账号不存在",   "帐号不存在",
      "该用户不存在",   "用户名或密码",   "no such user", "user does not exist",
      "username does not exist", "user not found", "unknown user",
      "username or password",
  };
  b.success = {
      "登录成功", "登陆成功", "操作成功",        "成功",
      "welcome",  "login successful", "logged in", "success",
  };
  return b;
}

Blacklist load_blacklist(const std::string& path, bool extend) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open blacklist file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed blacklist JSON in " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw std::runtime_error("blacklist file must hold a JSON object");

  Blacklist b = extend ? default_blacklist() : Blacklist{};
  auto read_into = [&](const char* key, std::vector<std::string>& list) {
    if (!doc.contains(key)) return;
    for (const auto& item : doc.at(key)) {
      std::string kw = item.get<std::string>();
      if (std::find(list.begin(), list.end(), kw) == list.end()) list.push_back(kw);
    }
  };
  read_into("wrong_password", b.wrong_password);
  read_into("max_attempts", b.max_attempts);
  read_into("firewall", b.firewall);
  read_into("username_missing", b.username_missing);
  read_into("success", b.success);

  static const std::vector<std::string> known = {"wrong_password", "max_attempts",
                                                 "firewall", "username_missing", "success"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::runtime_error("unknown blacklist key: " + key);
  }
  return b;
}

}  // namespace credaudit
