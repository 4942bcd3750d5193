#include "credaudit/page_analyzer.hpp"

#include <algorithm>
#include <cctype>

namespace credaudit {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool contains_any(const std::string& haystack_lower, const std::vector<std::string>& needles) {
  for (const auto& n : needles)
    if (haystack_lower.find(n) != std::string::npos) return true;
  return false;
}

struct Tag {
  std::string name;  // lowercase, without '/'
  bool closing = false;
  std::vector<std::pair<std::string, std::string>> attrs;  // names lowercase
};

// Tolerant tag scanner: enough HTML to pull forms, inputs, images and titles
// out of CMS login pages. Script/style bodies are skipped, comments ignored.
std::vector<Tag> scan_tags(const std::string& html) {
  std::vector<Tag> tags;
  size_t i = 0;
  const size_t n = html.size();
  while (i < n) {
    if (html[i] != '<') {
      ++i;
      continue;
    }
    if (html.compare(i, 4, "<!--") == 0) {
      auto end = html.find("-->", i + 4);
      i = end == std::string::npos ? n : end + 3;
      continue;
    }
    size_t j = i + 1;
    Tag tag;
    if (j < n && html[j] == '/') {
      tag.closing = true;
      ++j;
    }
    size_t name_start = j;
    while (j < n && (std::isalnum(static_cast<unsigned char>(html[j])) || html[j] == '!'))
      ++j;
    if (j == name_start) {
      ++i;
      continue;
    }
    tag.name = lower(std::string_view(html).substr(name_start, j - name_start));

    // attributes until '>'
    while (j < n && html[j] != '>') {
      while (j < n && (std::isspace(static_cast<unsigned char>(html[j])) || html[j] == '/'))
        ++j;
      if (j >= n || html[j] == '>') break;
      size_t attr_start = j;
      while (j < n && html[j] != '=' && html[j] != '>' &&
             !std::isspace(static_cast<unsigned char>(html[j])) && html[j] != '/')
        ++j;
      std::string attr_name = lower(std::string_view(html).substr(attr_start, j - attr_start));
      std::string attr_value;
      size_t k = j;
      while (k < n && std::isspace(static_cast<unsigned char>(html[k]))) ++k;
      if (k < n && html[k] == '=') {
        ++k;
        while (k < n && std::isspace(static_cast<unsigned char>(html[k]))) ++k;
        if (k < n && (html[k] == '"' || html[k] == '\'')) {
          char quote = html[k++];
          size_t vstart = k;
          while (k < n && html[k] != quote) ++k;
          attr_value = html.substr(vstart, k - vstart);
          if (k < n) ++k;
        } else {
          size_t vstart = k;
          while (k < n && html[k] != '>' &&
                 !std::isspace(static_cast<unsigned char>(html[k])))
            ++k;
          attr_value = html.substr(vstart, k - vstart);
        }
        j = k;
      }
      if (!attr_name.empty()) tag.attrs.emplace_back(attr_name, attr_value);
    }
    if (j < n) ++j;  // consume '>'
    i = j;

    if (!tag.closing && (tag.name == "script" || tag.name == "style")) {
      std::string close = "</" + tag.name;
      size_t end = lower(html).find(close, i);
      i = end == std::string::npos ? n : end;
    }
    tags.push_back(std::move(tag));
  }
  return tags;
}

std::string attr(const Tag& tag, const std::string& name) {
  for (const auto& [k, v] : tag.attrs)
    if (k == name) return v;
  return {};
}

bool is_field_tag(const Tag& t) {
  return t.name == "input" || t.name == "select" || t.name == "textarea" ||
         t.name == "button";
}

struct ScannedForm {
  std::string action;
  std::string method;
  std::vector<RawField> fields;
  bool has_password = false;
};

std::vector<ScannedForm> collect_forms(const std::vector<Tag>& tags) {
  std::vector<ScannedForm> forms;
  ScannedForm* open = nullptr;
  for (const auto& t : tags) {
    if (t.name == "form" && !t.closing) {
      forms.push_back({attr(t, "action"), lower(attr(t, "method")), {}, false});
      open = &forms.back();
    } else if (t.name == "form" && t.closing) {
      open = nullptr;
    } else if (open && is_field_tag(t) && !t.closing) {
      RawField f;
      f.name = attr(t, "name");
      f.type = lower(attr(t, "type"));
      f.value = attr(t, "value");
      if (f.type == "password") open->has_password = true;
      if (!f.name.empty()) open->fields.push_back(std::move(f));
    }
  }
  return forms;
}

bool matches_keyword(const std::string& field_name, const std::vector<std::string>& kws) {
  std::string n = lower(field_name);
  return contains_any(n, kws);
}

bool is_reset_control(const RawField& f) {
  return f.type == "reset" || lower(f.name).find("reset") != std::string::npos;
}

}  // namespace

const std::vector<std::string>& user_field_keywords() {
  static const std::vector<std::string> kws = {"user",  "name",  "zhanghao",
                                               "yonghu", "email", "account"};
  return kws;
}

const std::vector<std::string>& pass_field_keywords() {
  static const std::vector<std::string> kws = {"pass", "pw", "mima"};
  return kws;
}

const std::vector<std::string>& captcha_keywords() {
  static const std::vector<std::string> kws = {"captcha",  "verifycode", "checkcode",
                                               "validate", "yanzhengma", "seccode"};
  return kws;
}

const std::vector<std::string>& login_page_keywords() {
  static const std::vector<std::string> kws = {
      "login", "log in", "sign in", "signin", "logon",
      "登录",  "登陆",   "管理",    "后台",   "用户名",
      "密码",  "admin",  "password", "username"};
  return kws;
}

// Visible text plus control labels; raw attribute values like
// type="password" must not satisfy the login keyword check.
static std::string searchable_text(const std::string& html,
                                   const std::vector<Tag>& tags) {
  std::string text;
  bool in_tag = false;
  for (char c : html) {
    if (c == '<')
      in_tag = true;
    else if (c == '>')
      in_tag = false;
    else if (!in_tag)
      text += c;
  }
  for (const auto& t : tags) {
    if (t.closing) continue;
    if (t.name == "input" || t.name == "button") {
      text += ' ';
      text += attr(t, "value");
    }
  }
  return text;
}

LoginPageVerdict identify_login_page(const ResponsePage& page) {
  const std::string& text = page.decoded_text.empty() ? page.body : page.decoded_text;
  auto tags = scan_tags(text);

  for (const auto& t : tags) {
    if (t.closing) continue;
    if (t.name == "input" || t.name == "img") {
      std::string probe = lower(attr(t, "name")) + " " + lower(attr(t, "id")) + " " +
                          lower(attr(t, "src"));
      if (contains_any(probe, captcha_keywords())) return {PageKind::Captcha};
    }
  }

  auto forms = collect_forms(tags);
  bool password_form =
      std::any_of(forms.begin(), forms.end(), [](const ScannedForm& f) { return f.has_password; });
  if (password_form && contains_any(lower(searchable_text(text, tags)), login_page_keywords()))
    return {PageKind::Login};
  return {PageKind::NotLogin};
}

RawForm extract_form(const ResponsePage& page, const std::string& base_url) {
  const std::string& text = page.decoded_text.empty() ? page.body : page.decoded_text;
  auto forms = collect_forms(scan_tags(text));
  auto it = std::find_if(forms.begin(), forms.end(),
                         [](const ScannedForm& f) { return f.has_password; });
  if (it == forms.end())
    throw analysis_error("no form with a password input on " + base_url);

  RawForm out;
  out.action_url = it->action.empty() ? base_url : resolve_url(base_url, it->action);
  out.method = it->method == "get" ? "GET" : "POST";
  out.fields = it->fields;
  return out;
}

FormDescriptor identify_params(const RawForm& form) {
  FormDescriptor d;
  d.action_url = form.action_url;
  d.method = form.method;

  for (const auto& f : form.fields) {
    if (d.pass_key.empty() && matches_keyword(f.name, pass_field_keywords())) {
      d.pass_key = f.name;
      break;
    }
  }
  if (d.pass_key.empty()) throw analysis_error("password parameter not identifiable");

  for (const auto& f : form.fields) {
    if (f.name == d.pass_key) continue;
    if (matches_keyword(f.name, user_field_keywords())) {
      d.user_key = f.name;
      break;
    }
  }
  // no username field: password-only panel, user_key stays empty

  for (const auto& f : form.fields) {
    if (is_reset_control(f)) continue;
    bool dup = std::any_of(d.params.begin(), d.params.end(),
                           [&](const auto& p) { return p.first == f.name; });
    if (!dup) d.params.emplace_back(f.name, f.value);
  }
  return d;
}

FormDescriptor analyze_login_form(const ResponsePage& page, const std::string& base_url) {
  return identify_params(extract_form(page, base_url));
}

ParamList build_payload(const FormDescriptor& form, const std::string& username,
                        const std::string& password) {
  ParamList payload = form.params;
  for (auto& [k, v] : payload) {
    if (!form.user_key.empty() && k == form.user_key)
      v = username;
    else if (k == form.pass_key)
      v = password;
  }
  return payload;
}

}  // namespace credaudit
