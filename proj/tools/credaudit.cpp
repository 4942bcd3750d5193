// Batch front door: scan targets, run the local simulator, train and query
// PCFG grammars, and compute report metrics.

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "credaudit/blacklist.hpp"
#include "credaudit/dictionaries.hpp"
#include "credaudit/engine.hpp"
#include "credaudit/pcfg.hpp"
#include "credaudit/report.hpp"
#include "credaudit/simulator.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;
void handle_signal(int) { g_stop = 1; }

void print_result_line(const credaudit::BlastResult& r) {
  std::cout << r.target << "  " << to_string(r.outcome);
  if (r.credential)
    std::cout << "  " << r.credential->username << "/" << r.credential->password;
  std::cout << "  attempts=" << r.attempts;
  if (!r.note.empty()) std::cout << "  (" << r.note << ")";
  std::cout << "\n";
}

int cmd_scan(const std::string& target_arg, const std::string& rules_path,
             const std::string& corpus_path, std::uint64_t seed, int concurrency,
             const std::string& length_mode, bool no_universal, bool no_recheck,
             const std::string& report_path, const std::string& log_path,
             const std::string& username, const std::string& blacklist_path,
             const std::string& truth_path, bool authorized, double timeout) {
  credaudit::BatchConfig config;
  config.engine.username = username;
  config.engine.seed = seed;
  config.engine.session.timeout_seconds = timeout;
  config.engine.universal_enabled = !no_universal;
  config.engine.recheck_enabled = !no_recheck;
  config.engine.length_mode = length_mode == "total" ? credaudit::LengthMode::Total
                                                     : credaudit::LengthMode::Body;
  config.concurrency = concurrency;
  config.authorized = authorized;

  if (!rules_path.empty()) config.rules = credaudit::load_rules(rules_path);

  if (!corpus_path.empty()) {
    auto corpus = credaudit::load_corpus(corpus_path);
    config.engine.grammar = credaudit::train_pcfg(corpus);
  }

  std::vector<std::string> targets;
  if (credaudit::is_absolute_url(target_arg))
    targets.push_back(target_arg);
  else
    targets = credaudit::load_targets(target_arg);
  if (targets.empty()) {
    std::cerr << "no targets to scan\n";
    return 2;
  }

  std::ofstream log_file;
  if (!log_path.empty()) {
    log_file.open(log_path);
    if (!log_file) {
      std::cerr << "cannot open attempt log " << log_path << "\n";
      return 2;
    }
    log_file << credaudit::attempt_log_header() << "\n";
    config.log = [&log_file](const credaudit::AttemptRecord& rec) {
      log_file << credaudit::to_csv_line(rec) << "\n";
    };
  }

  if (!blacklist_path.empty())
    config.blacklist = credaudit::load_blacklist(blacklist_path);

  credaudit::ScanReport report = credaudit::run_batch(targets, config);
  for (const auto& r : report.results) print_result_line(r);

  if (!truth_path.empty()) {
    auto truth = credaudit::load_truth(truth_path);
    report.metrics = credaudit::compute_metrics(report.results, truth);
    const auto& m = *report.metrics;
    std::cout << "p_correct="
              << (m.p_correct() ? credaudit::format_percent(*m.p_correct()) : "n/a")
              << "  p_recognize=" << credaudit::format_percent(m.p_recognize()) << "\n";
  }

  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) {
      std::cerr << "cannot write report " << report_path << "\n";
      return 2;
    }
    out << credaudit::report_to_json(report);
  }
  return 0;
}

int cmd_simulate(const std::string& scenario_arg, int port, bool list) {
  if (list) {
    for (const auto& s : credaudit::scenario_catalog())
      std::cout << s.name << "  expected=" << to_string(s.expected_outcome) << "\n";
    return 0;
  }
  credaudit::Scenario scenario;
  if (std::ifstream probe(scenario_arg); probe.good())
    scenario = credaudit::load_scenario(scenario_arg);
  else
    scenario = credaudit::scenario_by_name(scenario_arg);

  credaudit::SimServer server(scenario, port);
  std::cout << "scenario '" << scenario.name << "' listening on " << server.login_url()
            << " (Ctrl-C to stop)\n";
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"credaudit: weak-password and universal-password login audit"};
  app.require_subcommand(1);

  // scan
  std::string target_arg, rules_path, corpus_path, report_path, log_path;
  std::string username = "admin";
  std::string blacklist_path, truth_path;
  std::string length_mode = "body";
  std::uint64_t seed = 1;
  int concurrency = 8;
  double timeout = 10.0;
  bool no_universal = false, no_recheck = false, authorized = false;

  auto* scan = app.add_subcommand("scan", "blast one target or a file of targets");
  scan->add_option("target", target_arg, "URL or targets file (one URL per line)")
      ->required();
  scan->add_option("--rules", rules_path, "custom CMS rules (JSON array)");
  scan->add_option("--corpus", corpus_path, "password corpus to train the PCFG round");
  scan->add_option("--seed", seed, "deterministic seed");
  scan->add_option("--concurrency", concurrency, "simultaneous targets")
      ->check(CLI::Range(1, 256));
  scan->add_option("--length-mode", length_mode, "body|total response length metric")
      ->check(CLI::IsMember({"body", "total"}));
  scan->add_flag("--no-universal", no_universal, "disable the universal-password module");
  scan->add_flag("--no-recheck", no_recheck, "disable judgment step 4 (recheck)");
  scan->add_option("--report", report_path, "write the JSON report here");
  scan->add_option("--log", log_path, "write the CSV attempt log here");
  scan->add_option("--username", username, "username to blast");
  scan->add_option("--blacklist", blacklist_path, "extra keyword lists (JSON)");
  scan->add_option("--truth", truth_path, "ground-truth JSON for metric computation");
  scan->add_flag("--i-am-authorized", authorized,
                 "confirm authorization to scan non-loopback targets");
  scan->add_option("--timeout", timeout, "per-request timeout in seconds");

  // simulate
  std::string scenario_arg;
  int sim_port = 0;
  bool sim_list = false;
  auto* simulate = app.add_subcommand("simulate", "run a local target simulator");
  simulate->add_option("scenario", scenario_arg, "builtin scenario name or JSON file");
  simulate->add_option("--port", sim_port, "listen port (0 = pick a free one)");
  simulate->add_flag("--list", sim_list, "list builtin scenarios");

  // train
  std::string train_corpus, train_out = "grammar.json";
  auto* train = app.add_subcommand("train", "train a PCFG grammar from a corpus");
  train->add_option("corpus", train_corpus, "one password per line")->required();
  train->add_option("--out", train_out, "grammar output path");

  // guess
  std::string guess_grammar;
  std::size_t guess_n = 20;
  std::vector<std::string> guess_hints;
  auto* guess = app.add_subcommand("guess", "emit guesses in descending probability");
  guess->add_option("grammar", guess_grammar, "grammar JSON from `train`")->required();
  guess->add_option("-n", guess_n, "number of guesses");
  guess->add_option("--hint", guess_hints, "hint keyword(s) to inject");

  // metrics
  std::string metrics_report, metrics_truth;
  auto* metrics = app.add_subcommand("metrics", "recompute p(correct)/p(recognize)");
  metrics->add_option("report", metrics_report, "report JSON from `scan`")->required();
  metrics->add_option("truth", metrics_truth, "ground-truth JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (scan->parsed())
      return cmd_scan(target_arg, rules_path, corpus_path, seed, concurrency, length_mode,
                      no_universal, no_recheck, report_path, log_path, username,
                      blacklist_path, truth_path, authorized, timeout);
    if (simulate->parsed()) {
      if (!sim_list && scenario_arg.empty()) {
        std::cerr << "simulate: give a scenario name/file or --list\n";
        return 2;
      }
      return cmd_simulate(scenario_arg, sim_port, sim_list);
    }
    if (train->parsed()) {
      auto grammar = credaudit::train_pcfg(credaudit::load_corpus(train_corpus));
      credaudit::save_grammar(grammar, train_out);
      std::cout << "trained " << grammar.structures.size() << " structures, "
                << grammar.combination_count() << " combinations -> " << train_out << "\n";
      return 0;
    }
    if (guess->parsed()) {
      auto grammar = credaudit::load_grammar(guess_grammar);
      if (!guess_hints.empty()) grammar = credaudit::with_hints(grammar, guess_hints);
      for (const auto& g : credaudit::generate_guesses(grammar, guess_n))
        std::cout << g.password << "\t" << g.probability << "\n";
      return 0;
    }
    if (metrics->parsed()) {
      std::ifstream in(metrics_report);
      if (!in) throw std::runtime_error("cannot open report: " + metrics_report);
      std::string text((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      auto results = credaudit::results_from_report_json(text);
      auto truth = credaudit::load_truth(metrics_truth);
      auto m = credaudit::compute_metrics(results, truth);
      std::cout << "n_success=" << m.n_success << " n_fail=" << m.n_fail
                << " n_effect=" << m.n_effect << " n_wrong=" << m.n_wrong
                << " n_error=" << m.n_error << "\n";
      std::cout << "p_correct="
                << (m.p_correct() ? credaudit::format_percent(*m.p_correct()) : "n/a")
                << "\n";
      std::cout << "p_recognize=" << credaudit::format_percent(m.p_recognize()) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
