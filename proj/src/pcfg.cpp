#include "credaudit/pcfg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace credaudit {
namespace {

SegClass classify_char(unsigned char c) {
  if (std::isalpha(c)) return SegClass::Letter;
  if (std::isdigit(c)) return SegClass::Digit;
  return SegClass::Special;
}

void normalize(std::map<std::string, double>& table) {
  double total = 0;
  for (const auto& [k, v] : table) total += v;
  if (total <= 0) return;
  for (auto& [k, v] : table) v /= total;
}

}  // namespace

SplitResult split_password(std::string_view password) {
  if (password.empty()) throw std::invalid_argument("cannot split an empty password");
  SplitResult out;
  SegClass current = classify_char(static_cast<unsigned char>(password[0]));
  std::string run;
  auto flush = [&]() {
    out.structure += static_cast<char>(current);
    out.structure += std::to_string(run.size());
    out.segments.push_back({current, run});
    run.clear();
  };
  for (char c : password) {
    SegClass cls = classify_char(static_cast<unsigned char>(c));
    if (cls != current && !run.empty()) {
      flush();
      current = cls;
    }
    run += c;
  }
  flush();
  return out;
}

std::vector<StructureToken> parse_structure(const std::string& structure) {
  std::vector<StructureToken> tokens;
  size_t i = 0;
  while (i < structure.size()) {
    char c = structure[i];
    if (c != 'L' && c != 'D' && c != 'S' && c != 'H')
      throw std::invalid_argument("bad segment class in structure: " + structure);
    size_t j = i + 1;
    while (j < structure.size() && std::isdigit(static_cast<unsigned char>(structure[j])))
      ++j;
    if (j == i + 1) throw std::invalid_argument("missing length in structure: " + structure);
    tokens.push_back({static_cast<SegClass>(c), std::stoi(structure.substr(i + 1, j - i - 1))});
    if (tokens.back().length <= 0)
      throw std::invalid_argument("non-positive length in structure: " + structure);
    i = j;
  }
  if (tokens.empty()) throw std::invalid_argument("empty structure");
  return tokens;
}

bool PcfgGrammar::check_normalized(double tol) const {
  double total = 0;
  for (const auto& [k, v] : structures) total += v;
  if (std::abs(total - 1.0) > tol) return false;
  for (const auto& [key, table] : segments) {
    double t = 0;
    for (const auto& [lit, p] : table) t += p;
    if (std::abs(t - 1.0) > tol) return false;
  }
  return true;
}

std::size_t PcfgGrammar::combination_count() const {
  std::size_t total = 0;
  for (const auto& [name, prob] : structures) {
    std::size_t combos = 1;
    bool ok = true;
    for (const auto& tok : parse_structure(name)) {
      auto it = segments.find({static_cast<char>(tok.cls), tok.length});
      if (it == segments.end() || it->second.empty()) {
        ok = false;
        break;
      }
      combos *= it->second.size();
    }
    if (ok) total += combos;
  }
  return total;
}

PcfgGrammar train_pcfg(const std::vector<std::string>& corpus) {
  PcfgGrammar g;
  std::size_t used = 0;
  for (const auto& pw : corpus) {
    if (pw.empty()) continue;
    auto split = split_password(pw);
    g.structures[split.structure] += 1.0;
    for (const auto& seg : split.segments)
      g.segments[{static_cast<char>(seg.cls), static_cast<int>(seg.text.size())}][seg.text] +=
          1.0;
    ++used;
  }
  if (used == 0) throw training_error("training corpus is empty");
  normalize(g.structures);
  for (auto& [key, table] : g.segments) normalize(table);
  return g;
}

double password_probability(const PcfgGrammar& grammar, std::string_view password) {
  if (password.empty()) return 0.0;
  auto split = split_password(password);
  auto sit = grammar.structures.find(split.structure);
  if (sit == grammar.structures.end()) return 0.0;
  double p = sit->second;
  for (const auto& seg : split.segments) {
    auto bucket =
        grammar.segments.find({static_cast<char>(seg.cls), static_cast<int>(seg.text.size())});
    if (bucket == grammar.segments.end()) return 0.0;
    auto lit = bucket->second.find(seg.text);
    if (lit == bucket->second.end()) return 0.0;
    p *= lit->second;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Guess enumeration

namespace {

using Bucket = std::vector<std::pair<std::string, double>>;  // sorted desc, lex asc on ties

struct PreparedStructure {
  double prob;
  std::vector<const Bucket*> buckets;
};

struct State {
  int structure;
  std::vector<int> ranks;
  int pivot;  // children may only advance positions >= pivot (unique generation)
  double prob;
};

struct StateLess {
  bool operator()(const State& a, const State& b) const { return a.prob < b.prob; }
};

}  // namespace

struct GuessStream::Impl {
  std::map<SegKey, Bucket> bucket_store;
  std::vector<PreparedStructure> prepared;
  std::priority_queue<State, std::vector<State>, StateLess> heap;
  std::vector<ScoredGuess> ready;  // current plateau, emitted back to front
  std::unordered_set<std::string> excluded;
  std::unordered_set<std::string> emitted;

  explicit Impl(const PcfgGrammar& grammar) {
    for (const auto& [key, table] : grammar.segments) {
      Bucket b(table.begin(), table.end());
      std::sort(b.begin(), b.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
      });
      bucket_store[key] = std::move(b);
    }
    for (const auto& [name, prob] : grammar.structures) {
      PreparedStructure ps;
      ps.prob = prob;
      bool ok = true;
      for (const auto& tok : parse_structure(name)) {
        auto it = bucket_store.find({static_cast<char>(tok.cls), tok.length});
        if (it == bucket_store.end() || it->second.empty()) {
          ok = false;
          break;
        }
        ps.buckets.push_back(&it->second);
      }
      if (!ok) continue;
      prepared.push_back(std::move(ps));
      State s;
      s.structure = static_cast<int>(prepared.size()) - 1;
      s.ranks.assign(prepared.back().buckets.size(), 0);
      s.pivot = 0;
      s.prob = state_probability(s);
      heap.push(std::move(s));
    }
  }

  // Recomputed from scratch, left to right, so the value is bit-identical to
  // an independent enumeration multiplying in the same order.
  double state_probability(const State& s) const {
    const auto& ps = prepared[s.structure];
    double p = ps.prob;
    for (size_t i = 0; i < s.ranks.size(); ++i) p *= (*ps.buckets[i])[s.ranks[i]].second;
    return p;
  }

  std::string state_password(const State& s) const {
    const auto& ps = prepared[s.structure];
    std::string pw;
    for (size_t i = 0; i < s.ranks.size(); ++i) pw += (*ps.buckets[i])[s.ranks[i]].first;
    return pw;
  }

  void push_children(const State& s) {
    const auto& ps = prepared[s.structure];
    for (size_t i = s.pivot; i < s.ranks.size(); ++i) {
      if (s.ranks[i] + 1 >= static_cast<int>(ps.buckets[i]->size())) continue;
      State child = s;
      child.ranks[i] += 1;
      child.pivot = static_cast<int>(i);
      child.prob = state_probability(child);
      heap.push(std::move(child));
    }
  }

  // Pops the whole equal-probability plateau, sorts it lexicographically and
  // leaves it in `ready` in reverse order for pop_back consumption.
  void refill() {
    if (heap.empty()) return;
    const double level = heap.top().prob;
    std::vector<ScoredGuess> plateau;
    while (!heap.empty() && heap.top().prob == level) {
      State s = heap.top();
      heap.pop();
      plateau.push_back({state_password(s), s.prob});
      push_children(s);
    }
    std::sort(plateau.begin(), plateau.end(),
              [](const ScoredGuess& a, const ScoredGuess& b) { return a.password < b.password; });
    ready.assign(plateau.rbegin(), plateau.rend());
  }

  std::optional<ScoredGuess> next() {
    for (;;) {
      if (ready.empty()) refill();
      if (ready.empty()) return std::nullopt;
      ScoredGuess g = std::move(ready.back());
      ready.pop_back();
      if (excluded.count(g.password) || !emitted.insert(g.password).second) continue;
      return g;
    }
  }
};

GuessStream::GuessStream(const PcfgGrammar& grammar) : impl_(std::make_unique<Impl>(grammar)) {}
GuessStream::GuessStream(GuessStream&&) noexcept = default;
GuessStream& GuessStream::operator=(GuessStream&&) noexcept = default;
GuessStream::~GuessStream() = default;

std::optional<ScoredGuess> GuessStream::next() { return impl_->next(); }

void GuessStream::exclude(const std::string& password) { impl_->excluded.insert(password); }

std::vector<ScoredGuess> generate_guesses(const PcfgGrammar& grammar, std::size_t n) {
  GuessStream stream(grammar);
  std::vector<ScoredGuess> out;
  while (out.size() < n) {
    auto g = stream.next();
    if (!g) break;
    out.push_back(std::move(*g));
  }
  return out;
}

PcfgGrammar with_hints(const PcfgGrammar& grammar, const std::vector<std::string>& hints,
                       double boost) {
  PcfgGrammar g = grammar;
  std::vector<std::string> fresh;
  for (const auto& h : hints) {
    if (h.empty()) continue;
    if (std::find(g.hints.begin(), g.hints.end(), h) == g.hints.end()) {
      g.hints.push_back(h);
      fresh.push_back(h);
    }
  }
  if (fresh.empty()) return g;

  for (const auto& h : fresh)
    g.segments[{'H', static_cast<int>(h.size())}][h] = boost;
  for (auto& [key, table] : g.segments)
    if (key.first == 'H') normalize(table);

  std::vector<int> hint_lengths;
  for (const auto& h : g.hints) hint_lengths.push_back(static_cast<int>(h.size()));

  std::map<std::string, double> synthesized;
  for (const auto& [name, prob] : grammar.structures) {
    auto tokens = parse_structure(name);
    for (int len : hint_lengths) {
      auto it = std::find_if(tokens.begin(), tokens.end(), [&](const StructureToken& t) {
        return t.cls == SegClass::Letter && t.length == len;
      });
      if (it == tokens.end()) continue;
      std::string variant;
      for (const auto& t : tokens) {
        bool swap = (&t == &*it);
        variant += swap ? 'H' : static_cast<char>(t.cls);
        variant += std::to_string(t.length);
      }
      double w = boost * prob;
      auto [pos, inserted] = synthesized.try_emplace(variant, w);
      if (!inserted) pos->second = std::max(pos->second, w);
    }
  }
  for (const auto& [name, w] : synthesized) {
    auto [pos, inserted] = g.structures.try_emplace(name, w);
    if (!inserted) pos->second = std::max(pos->second, w);
  }
  normalize(g.structures);
  return g;
}

// ---------------------------------------------------------------------------
// Serialization

std::string grammar_to_json(const PcfgGrammar& grammar) {
  nlohmann::ordered_json doc;
  doc["structures"] = nlohmann::ordered_json::object();
  for (const auto& [name, p] : grammar.structures) doc["structures"][name] = p;
  doc["segments"] = nlohmann::ordered_json::object();
  for (const auto& [key, table] : grammar.segments) {
    std::string cls(1, key.first);
    std::string len = std::to_string(key.second);
    for (const auto& [lit, p] : table) doc["segments"][cls][len][lit] = p;
  }
  doc["hints"] = grammar.hints;
  return doc.dump(2);
}

PcfgGrammar grammar_from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed grammar JSON: ") + e.what());
  }
  PcfgGrammar g;
  for (const auto& [name, p] : doc.at("structures").items())
    g.structures[name] = p.get<double>();
  for (const auto& [cls, by_len] : doc.at("segments").items()) {
    if (cls.size() != 1) throw std::runtime_error("bad segment class: " + cls);
    for (const auto& [len, table] : by_len.items())
      for (const auto& [lit, p] : table.items())
        g.segments[{cls[0], std::stoi(len)}][lit] = p.get<double>();
  }
  if (doc.contains("hints"))
    g.hints = doc.at("hints").get<std::vector<std::string>>();
  return g;
}

void save_grammar(const PcfgGrammar& grammar, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grammar file: " + path);
  out << grammar_to_json(grammar) << "\n";
}

PcfgGrammar load_grammar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grammar file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return grammar_from_json(text);
}

std::vector<std::string> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace credaudit
