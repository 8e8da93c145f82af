#pragma once

// Lazy version-space synthesis of repair rules from example triples.
//
// A symbolic rule keeps every match and fix component as a constant until an
// example forces a promotion: mismatching input tokens become variables with
// the longest shared prefix/suffix, mismatching output tokens become sets of
// substring expressions stored in a compact (variable, prefix, suffix) ->
// position-pair map. The bindings observed per example are stored alongside,
// so the training examples can always be reconstructed from the rule itself.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmdfix/dsl.hpp"

namespace cmdfix {

struct Example {
  TokenSeq cmd;
  TokenSeq err;
  TokenSeq fix;
  bool operator==(const Example&) const = default;
};

// Tokenizes the three raw strings.
Example make_example(std::string_view cmd, std::string_view err,
                     std::string_view fix);

// Token at 0-based position in cmd @ err.
const std::string& token_at(const Example& e, int concat_index);
int input_size(const Example& e);

struct SynthConfig {
  // Bound on |delta| in enumerated character-relative positions. The
  // enumeration is complete for this fragment of the language.
  int max_offset = 1;
};

// Key of the compact fix-candidate map: which variable the substring comes
// from and the constant strings wrapped around it.
struct SubLrKey {
  int var_index = 0;
  std::string prefix;
  std::string suffix;
  auto operator<=>(const SubLrKey&) const = default;
};

using PosPair = std::pair<PosExpr, PosExpr>;

// All substring expressions consistent with the processed examples at one
// fix position, plus the output token seen per example.
struct CandidateSet {
  std::map<SubLrKey, std::vector<PosPair>> entries;  // pair lists sorted
  std::vector<std::string> bindings;

  bool empty() const { return entries.empty(); }
  std::size_t total_pairs() const;
  bool contains(const SubLr& expr) const;
  bool operator==(const CandidateSet&) const = default;
};

SubLr make_sublr(const SubLrKey& key, const PosPair& pair);

struct FixedTok {
  std::string text;
  bool operator==(const FixedTok&) const = default;
};

struct VarComponent {
  int index = 0;
  std::string prefix;
  std::string suffix;
  std::vector<std::string> bindings;  // one per example, processing order
  bool operator==(const VarComponent&) const = default;
};

using SymbolicMatchComponent = std::variant<FixedTok, VarComponent>;

struct FixedStr {
  std::string text;
  bool operator==(const FixedStr&) const = default;
};

using SymbolicFixComponent = std::variant<FixedStr, CandidateSet>;

struct SymbolicRule {
  std::vector<SymbolicMatchComponent> cmd_match;
  std::vector<SymbolicMatchComponent> err_match;
  std::vector<SymbolicFixComponent> fix;
  int example_count = 0;
  bool operator==(const SymbolicRule&) const = default;
};

// All-constant rule copied verbatim from one example.
SymbolicRule const_rule(const Example& e);

struct FindVarsResult {
  std::vector<SymbolicMatchComponent> components;
  std::set<int> vars;  // every variable index present in components
};

// Unifies one token list against the current match components, promoting
// mismatching constants to variables and re-deriving each variable's
// prefix/suffix from its full binding list (longest common prefix and
// suffix, with the suffix trimmed until every binding can still match).
// nullopt on length mismatch. `offset` is the concat position of the first
// component; `prior_count` is the number of examples seen so far.
std::optional<FindVarsResult> find_variables(
    const TokenSeq& tokens, std::span<const SymbolicMatchComponent> components,
    int offset, int prior_count);

// Optional cap on enumerated wrap strings: prefixes limited to the common
// prefix length of all output tokens at the position, suffixes likewise.
struct AffixLimit {
  int max_prefix = 0;
  int max_suffix = 0;
};

// Every substring expression over a variable in `vars` that reproduces
// e.fix[fix_pos] on e with a non-empty extracted middle and |delta| bounded
// by the config. Bindings are left empty; callers fill them.
CandidateSet all_substrings(const Example& e, const std::set<int>& vars,
                            int fix_pos, const SynthConfig& cfg,
                            const AffixLimit* limit = nullptr);

// all_substrings on examples.front(), filtered by evaluation on the rest.
// Wrap strings are pre-restricted to common prefixes/suffixes of all output
// tokens at the position (a lossless cut). Bindings follow the given
// example order.
CandidateSet synth_substrings(std::span<const Example> examples,
                              const std::set<int>& vars, int fix_pos,
                              const SynthConfig& cfg);

// Re-derives the fix component list: agreeing constants are kept, anything
// else becomes the full consistent candidate set. nullopt when a needed
// candidate set is empty or lengths mismatch. Bindings follow the given
// example order.
std::optional<std::vector<SymbolicFixComponent>> synth_fix(
    const TokenSeq& fix_tokens, std::span<const SymbolicFixComponent> fix,
    std::span<const Example> examples, const std::set<int>& vars,
    const SynthConfig& cfg);

// Refines a rule with one more example. Existing candidate sets are filtered
// against the new example; fresh enumeration runs only for newly promoted
// variables and newly promoted fix positions.
std::optional<SymbolicRule> refine_rule(const SymbolicRule& r,
                                        std::span<const Example> priors,
                                        const Example& e,
                                        const SynthConfig& cfg);

// Same, reconstructing the prior examples from the rule's stored bindings.
std::optional<SymbolicRule> refine_rule(const SymbolicRule& r,
                                        const Example& e,
                                        const SynthConfig& cfg);

// The training examples, re-inferred from constants and stored bindings.
std::vector<Example> reconstruct_examples(const SymbolicRule& r);

// const_rule on the first example, then refine_rule folded over the rest.
// nullopt means no single rule covers the set.
std::optional<SymbolicRule> synth_rules(std::span<const Example> examples,
                                        const SynthConfig& cfg = {});

using RuleCount = boost::multiprecision::cpp_int;

// Number of concrete rules represented; exact (can be astronomically large).
RuleCount count_concrete(const SymbolicRule& r);

// Deterministic ranking of candidate expressions: lowest variable index,
// then absolute positions before character-relative ones (left side first),
// smaller |k|, positive k, smaller |delta|, non-negative delta, then the
// wrap strings.
bool rank_less(const SubLr& a, const SubLr& b);

// Candidates of one set, flattened in ranking order.
std::vector<SubLr> flatten_candidates(const CandidateSet& cs);

// Streams the concrete rules of a symbolic rule in ranking order per
// position (the first rule streamed equals rank_select).
class Concretizer {
 public:
  explicit Concretizer(const SymbolicRule& r);
  std::optional<ConcreteRule> next();

 private:
  std::vector<MatchExpr> cmd_match_;
  std::vector<MatchExpr> err_match_;
  std::vector<std::vector<FixExpr>> options_;
  std::vector<std::size_t> cursor_;
  bool done_ = false;
};

// Up to `cap` concrete rules, in enumeration order.
std::vector<ConcreteRule> concretize(const SymbolicRule& r, std::size_t cap);

// The highest-ranked concrete rule; nullopt if some candidate set is empty.
std::optional<ConcreteRule> rank_select(const SymbolicRule& r);

// eval_rule of the rank-selected rule.
std::optional<TokenSeq> apply_symbolic(const SymbolicRule& r,
                                       const TokenSeq& cmd,
                                       const TokenSeq& err);

// Rule with its example columns reordered canonically (sorted by the
// reconstructed examples' joined text). Rules synthesized from permutations
// of the same example set have identical canonical forms.
SymbolicRule canonical_form(const SymbolicRule& r);

// Constant match components count; used to order suggestions.
int specificity(const SymbolicRule& r);

}  // namespace cmdfix
