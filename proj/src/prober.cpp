#include "credaudit/prober.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace credaudit {
namespace {

std::string random_long_password(std::mt19937_64& rng, std::size_t length) {
  static const char alphabet[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::uniform_int_distribution<int> pick(0, sizeof(alphabet) - 2);
  std::string out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out += alphabet[pick(rng)];
  return out;
}

}  // namespace

double sample_median(std::vector<double> samples) {
  if (samples.empty()) return 0;
  std::sort(samples.begin(), samples.end());
  std::size_t n = samples.size();
  if (n % 2 == 1) return samples[n / 2];
  return (samples[n / 2 - 1] + samples[n / 2]) / 2.0;
}

ProbeReport probe_usernames(Session& session, const FormDescriptor& form,
                            const std::vector<std::string>& candidates,
                            const ProbeConfig& config,
                            const std::function<void(const AttemptRecord&)>& log) {
  if (candidates.empty()) throw probe_error("no candidate usernames");
  if (config.rounds < 1) throw probe_error("rounds must be >= 1");

  std::mt19937_64 rng(config.seed);
  std::map<std::string, std::vector<double>> samples;
  ProbeReport report;
  report.margin = config.margin;

  const std::size_t planned =
      static_cast<std::size_t>(config.rounds) * candidates.size();
  for (int round = 0; round < config.rounds; ++round) {
    std::vector<std::string> order = candidates;
    std::shuffle(order.begin(), order.end(), rng);

    std::string leader;
    double leader_ms = -1;
    for (const auto& username : order) {
      std::string password = random_long_password(rng, config.long_password_length);
      ParamList payload = build_payload(form, username, password);
      ResponsePage page;
      try {
        page = session.submit(form, payload);
      } catch (const transport_error&) {
        ++report.transport_errors;
        if (report.transport_errors >
            static_cast<int>(config.max_error_ratio * planned))
          throw probe_error("too many transport errors during username probe");
        continue;
      }
      samples[username].push_back(static_cast<double>(page.elapsed_ms));
      if (log) {
        AttemptRecord rec;
        rec.kind = AttemptKind::TimingProbe;
        rec.username = username;
        rec.password = "<long:" + std::to_string(config.long_password_length) + ">";
        rec.body_length = page.body_length;
        log(rec);
      }
      if (page.elapsed_ms > leader_ms) {
        leader_ms = static_cast<double>(page.elapsed_ms);
        leader = username;
      }
    }
    report.round_leaders.push_back(leader);
  }

  for (const auto& username : candidates) {
    TimingTrial trial;
    trial.username = username;
    trial.samples_ms = samples[username];
    trial.median_ms = sample_median(trial.samples_ms);
    report.ranked.push_back(std::move(trial));
  }
  std::stable_sort(report.ranked.begin(), report.ranked.end(),
                   [](const TimingTrial& a, const TimingTrial& b) {
                     return a.median_ms > b.median_ms;
                   });

  if (candidates.size() < 2 || report.ranked.size() < 2) return report;  // inconclusive

  const std::string& top = report.ranked[0].username;
  bool consistent = std::all_of(report.round_leaders.begin(), report.round_leaders.end(),
                                [&](const std::string& l) { return l == top; });
  double top_median = report.ranked[0].median_ms;
  double runner_median = report.ranked[1].median_ms;
  if (consistent && top_median > runner_median * (1.0 + config.margin))
    report.confirmed = top;
  return report;
}

}  // namespace credaudit
