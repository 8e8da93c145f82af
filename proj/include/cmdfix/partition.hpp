#pragma once

// Multi-rule learning from an undifferentiated example set: group by token
// counts, then search set partitions of each group in ascending block count
// until every block synthesizes a rule.

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cmdfix/synthesis.hpp"

namespace cmdfix {

struct Shape {
  int cmd_len = 0;
  int err_len = 0;
  int fix_len = 0;
  auto operator<=>(const Shape&) const = default;
};

Shape shape_of(const Example& e);

// Sort key used everywhere examples are canonicalized.
std::string example_key(const Example& e);

// Exact grouping by (|cmd|, |err|, |fix|); each group sorted canonically.
std::map<Shape, std::vector<Example>> group_by_shape(
    std::span<const Example> examples);

// Streams every set partition of {0..n-1}, ordered by block count ascending
// and, within one count, by restricted-growth-string order. Starts with the
// single block, ends with all singletons; yields Bell(n) partitions total.
class PartitionEnumerator {
 public:
  explicit PartitionEnumerator(int n);
  std::optional<std::vector<std::vector<int>>> next();

 private:
  bool advance_rgs();
  int blocks_in_rgs() const;

  int n_;
  int target_blocks_ = 1;
  std::vector<int> rgs_;
  bool rgs_fresh_ = true;
  bool done_ = false;
};

struct LearnResult {
  std::vector<Example> examples;   // input order preserved
  std::vector<SymbolicRule> rules;
  std::vector<int> assignment;     // examples[i] belongs to rules[assignment[i]]
  std::vector<int> unexplained;    // indices no rule covers (empty in practice)
  bool used_greedy = false;        // some group exceeded max_group
};

// Per shape group, the first partition (in enumeration order) whose blocks
// all synthesize wins. Groups larger than max_group fall back to a greedy
// pass: each example joins the first block that still synthesizes with it,
// else opens a new one.
LearnResult learn_rules(std::span<const Example> examples,
                        const SynthConfig& cfg = {}, int max_group = 10);

}  // namespace cmdfix
