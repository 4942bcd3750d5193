#ifndef CREDAUDIT_PCFG_HPP
#define CREDAUDIT_PCFG_HPP

#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace credaudit {

// Segment classes: L = letter run, D = digit run, S = special-character run,
// H = hint literal injected during dynamic adjustment.
enum class SegClass : char { Letter = 'L', Digit = 'D', Special = 'S', Hint = 'H' };

struct SplitSegment {
  SegClass cls;
  std::string text;
};

struct SplitResult {
  std::string structure;  // e.g. "L8D4S1"
  std::vector<SplitSegment> segments;
};

/// Maximal-run decomposition: letters -> L, digits -> D, everything else -> S.
/// Throws std::invalid_argument on an empty password.
SplitResult split_password(std::string_view password);

struct StructureToken {
  SegClass cls;
  int length;
};

/// Parses "L8D4S1" into tokens; throws std::invalid_argument on malformed input.
std::vector<StructureToken> parse_structure(const std::string& structure);

class training_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using SegKey = std::pair<char, int>;  // (class letter, segment length)

/// Structure-frequency and segment-frequency tables. Probabilities inside
/// each table sum to 1 (checked by check_normalized).
struct PcfgGrammar {
  std::map<std::string, double> structures;
  std::map<SegKey, std::map<std::string, double>> segments;
  std::vector<std::string> hints;

  bool check_normalized(double tol = 1e-9) const;
  std::size_t combination_count() const;  // total distinct guessable passwords
};

PcfgGrammar train_pcfg(const std::vector<std::string>& corpus);

/// P(structure) x product of per-segment literal probabilities, multiplied
/// left to right; 0 when any factor is absent from the tables.
double password_probability(const PcfgGrammar& grammar, std::string_view password);

struct ScoredGuess {
  std::string password;
  double probability;
};

/// Descending-probability enumeration without materializing the whole cross
/// product: a priority queue of (structure, segment-rank vector) states.
/// Equal-probability plateaus are emitted in lexicographic order so the
/// stream matches a full-enumeration sort exactly.
class GuessStream {
 public:
  explicit GuessStream(const PcfgGrammar& grammar);
  GuessStream(GuessStream&&) noexcept;
  GuessStream& operator=(GuessStream&&) noexcept;
  ~GuessStream();

  std::optional<ScoredGuess> next();

  /// Marks a password as already attempted; it will never be emitted.
  void exclude(const std::string& password);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<ScoredGuess> generate_guesses(const PcfgGrammar& grammar, std::size_t n);

/// Hint injection: each hint literal enters Σ₂ under class H with raw mass
/// `boost`, renormalized within its (H, length) bucket; for every structure
/// holding an L-segment of a hint's length, a variant with the first such
/// segment replaced by H is added at `boost` times the source weight, and Σ₁
/// is renormalized. This is the declared composition scheme for H inside
/// structures; it is isolated here.
PcfgGrammar with_hints(const PcfgGrammar& grammar, const std::vector<std::string>& hints,
                       double boost = 0.5);

std::string grammar_to_json(const PcfgGrammar& grammar);
PcfgGrammar grammar_from_json(const std::string& json_text);
void save_grammar(const PcfgGrammar& grammar, const std::string& path);
PcfgGrammar load_grammar(const std::string& path);

/// Corpus file: one password per line, UTF-8; blank lines skipped.
std::vector<std::string> load_corpus(const std::string& path);

}  // namespace credaudit

#endif
