#ifndef CREDAUDIT_PAGE_ANALYZER_HPP
#define CREDAUDIT_PAGE_ANALYZER_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "credaudit/http_session.hpp"

namespace credaudit {

enum class PageKind { Login, NotLogin, Captcha };

struct LoginPageVerdict {
  PageKind kind = PageKind::NotLogin;
};

/// Raised when a page cannot be analyzed into a usable login form; the
/// caller skips the target.
class analysis_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RawField {
  std::string name;
  std::string type;   // lowercase, "" when absent
  std::string value;
};

struct RawForm {
  std::string action_url;  // resolved, absolute
  std::string method;      // uppercase, defaults to POST for login forms
  std::vector<RawField> fields;
};

/// A login form ready for submission. `params` preserves document order and
/// keeps hidden token values verbatim; reset controls are already removed.
/// `user_key` may be empty for password-only panels.
struct FormDescriptor {
  std::string action_url;
  std::string method = "POST";
  ParamList params;
  std::string user_key;
  std::string pass_key;
};

LoginPageVerdict identify_login_page(const ResponsePage& page);

/// Picks the first form containing a password-type input and resolves its
/// action against `base_url`. Throws analysis_error when no such form exists.
RawForm extract_form(const ResponsePage& page, const std::string& base_url);

/// Marks user_key/pass_key by keyword, drops reset controls, retains all
/// other defaults (hidden CSRF tokens included). Throws analysis_error when
/// no password parameter can be identified.
FormDescriptor identify_params(const RawForm& form);

FormDescriptor analyze_login_form(const ResponsePage& page, const std::string& base_url);

/// Builds the submission payload: form defaults with user/pass substituted.
ParamList build_payload(const FormDescriptor& form, const std::string& username,
                        const std::string& password);

// Keyword tables. The login list is a declared constant and the documented
// extension point for page-verdict tuning.
const std::vector<std::string>& user_field_keywords();
const std::vector<std::string>& pass_field_keywords();
const std::vector<std::string>& captcha_keywords();
const std::vector<std::string>& login_page_keywords();

}  // namespace credaudit

#endif
