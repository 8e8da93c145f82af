#pragma once

// Brute-force reference implementations used by property tests and by the
// non-lazy synthesis baseline of the benchmark. Correctness over speed: the
// enumeration here is blind (every position expression within the bounds is
// evaluated), independent of how the engine constructs its candidates.

#include <optional>
#include <set>
#include <span>
#include <vector>

#include "cmdfix/synthesis.hpp"

namespace cmdfix {

struct OracleBounds {
  int max_abs_k = 1;      // bound on |k| in position expressions
  int max_abs_delta = 1;  // bound on |delta| in character-relative ones

  // max_abs_k = longest token anywhere in the examples, which covers every
  // expression the engine can produce.
  static OracleBounds for_examples(std::span<const Example> examples,
                                   int max_delta = 1);
};

// Every substring expression over a variable in `vars` whose evaluation
// reproduces fix[fix_pos] on every example, drawn from all absolute
// positions with |k| <= max_abs_k, all character-relative positions over
// characters of the bound string with |k| <= max_abs_k and |delta| <=
// max_abs_delta, and every wrap split of the first example's output token
// with a non-empty extracted middle. Sorted and deduplicated.
std::vector<SubLr> brute_substrings(std::span<const Example> examples,
                                    const std::set<int>& vars, int fix_pos,
                                    const OracleBounds& bounds);

// Candidates of one engine set, flattened and structurally sorted for set
// comparison against the oracle.
std::vector<SubLr> sorted_candidates(const CandidateSet& cs);

// Non-lazy baseline: every input position is a variable from the start and
// every output position is a full brute-force candidate set. nullopt when
// shapes differ or some output position has no explanation.
std::optional<SymbolicRule> nonlazy_synth(std::span<const Example> examples,
                                          const SynthConfig& cfg = {});

}  // namespace cmdfix
