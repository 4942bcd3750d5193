#ifndef CREDAUDIT_PROBER_HPP
#define CREDAUDIT_PROBER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "credaudit/events.hpp"
#include "credaudit/http_session.hpp"
#include "credaudit/page_analyzer.hpp"

namespace credaudit {

struct TimingTrial {
  std::string username;
  std::vector<double> samples_ms;
  double median_ms = 0;  // true sample median (midpoint average for even counts)
};

struct ProbeConfig {
  int rounds = 5;
  std::size_t long_password_length = 4096;
  double margin = 0.30;  // leader median must exceed runner-up by this relative gap
  std::uint64_t seed = 0;
  double max_error_ratio = 0.20;  // abort beyond this fraction of failed samples
};

struct ProbeReport {
  std::vector<TimingTrial> ranked;  // by median descending
  std::optional<std::string> confirmed;
  std::vector<std::string> round_leaders;
  double margin = 0;  // the relative gap the verdict was held to
  int transport_errors = 0;
};

class probe_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Submits every candidate with a freshly generated long password, in a
/// different shuffled order each round, and ranks by median response time.
/// The leader is confirmed only when it ranks first in every round and its
/// median clears the runner-up by the configured margin. Hash computation on
/// the server makes existing accounts measurably slower for long passwords.
ProbeReport probe_usernames(Session& session, const FormDescriptor& form,
                            const std::vector<std::string>& candidates,
                            const ProbeConfig& config,
                            const std::function<void(const AttemptRecord&)>& log = {});

double sample_median(std::vector<double> samples);

}  // namespace credaudit

#endif
