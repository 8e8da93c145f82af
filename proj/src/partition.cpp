#include "cmdfix/partition.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <unordered_map>

namespace cmdfix {

Shape shape_of(const Example& e) {
  return Shape{static_cast<int>(e.cmd.size()), static_cast<int>(e.err.size()),
               static_cast<int>(e.fix.size())};
}

std::string example_key(const Example& e) {
  return join(e.cmd) + '\n' + join(e.err) + '\n' + join(e.fix);
}

std::map<Shape, std::vector<Example>> group_by_shape(
    std::span<const Example> examples) {
  std::map<Shape, std::vector<Example>> groups;
  for (const Example& e : examples) groups[shape_of(e)].push_back(e);
  for (auto& [shape, group] : groups) {
    std::stable_sort(group.begin(), group.end(),
                     [](const Example& a, const Example& b) {
                       return example_key(a) < example_key(b);
                     });
  }
  return groups;
}

PartitionEnumerator::PartitionEnumerator(int n) : n_(n), rgs_(n, 0) {
  assert(n >= 1);
}

int PartitionEnumerator::blocks_in_rgs() const {
  int max_label = 0;
  for (int label : rgs_) max_label = std::max(max_label, label);
  return max_label + 1;
}

// Lexicographic successor over restricted growth strings: a[0] = 0 and
// a[i] <= max(a[0..i-1]) + 1.
bool PartitionEnumerator::advance_rgs() {
  for (int i = n_ - 1; i >= 1; --i) {
    int prefix_max = 0;
    for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, rgs_[j]);
    if (rgs_[i] <= prefix_max) {
      ++rgs_[i];
      std::fill(rgs_.begin() + i + 1, rgs_.end(), 0);
      return true;
    }
  }
  return false;
}

std::optional<std::vector<std::vector<int>>> PartitionEnumerator::next() {
  while (!done_) {
    if (rgs_fresh_) {
      rgs_fresh_ = false;
    } else if (!advance_rgs()) {
      ++target_blocks_;
      if (target_blocks_ > n_) {
        done_ = true;
        break;
      }
      std::fill(rgs_.begin(), rgs_.end(), 0);
    }
    if (blocks_in_rgs() != target_blocks_) continue;
    std::vector<std::vector<int>> blocks(target_blocks_);
    for (int i = 0; i < n_; ++i) blocks[rgs_[i]].push_back(i);
    return blocks;
  }
  return std::nullopt;
}

namespace {

// Exact search: first partition, in enumeration order, whose blocks all
// synthesize. Synthesis results are memoized per block (as an index mask),
// since the same block recurs across many partitions.
std::vector<std::pair<std::vector<int>, SymbolicRule>> partition_group_exact(
    const std::vector<Example>& group, const SynthConfig& cfg) {
  const int n = static_cast<int>(group.size());
  std::unordered_map<std::uint64_t, std::optional<SymbolicRule>> memo;
  auto synth_block =
      [&](const std::vector<int>& block) -> const std::optional<SymbolicRule>& {
    std::uint64_t mask = 0;
    for (int i : block) mask |= std::uint64_t(1) << i;
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    std::vector<Example> members;
    members.reserve(block.size());
    for (int i : block) members.push_back(group[i]);
    return memo.emplace(mask, synth_rules(members, cfg)).first->second;
  };

  PartitionEnumerator partitions(n);
  while (auto blocks = partitions.next()) {
    std::vector<std::pair<std::vector<int>, SymbolicRule>> result;
    bool all_ok = true;
    for (const auto& block : *blocks) {
      const auto& rule = synth_block(block);
      if (!rule) {
        all_ok = false;
        break;
      }
      result.emplace_back(block, *rule);
    }
    if (all_ok) return result;
  }
  // Unreachable: the all-singletons partition always synthesizes.
  return {};
}

std::vector<std::pair<std::vector<int>, SymbolicRule>> partition_group_greedy(
    const std::vector<Example>& group, const SynthConfig& cfg) {
  std::vector<std::pair<std::vector<int>, SymbolicRule>> blocks;
  for (int i = 0; i < static_cast<int>(group.size()); ++i) {
    bool placed = false;
    for (auto& [members, rule] : blocks) {
      if (auto refined = refine_rule(rule, group[i], cfg)) {
        rule = std::move(*refined);
        members.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) {
      auto rule = synth_rules(std::span(&group[i], 1), cfg);
      assert(rule);
      blocks.emplace_back(std::vector<int>{i}, std::move(*rule));
    }
  }
  return blocks;
}

}  // namespace

LearnResult learn_rules(std::span<const Example> examples,
                        const SynthConfig& cfg, int max_group) {
  LearnResult result;
  result.examples.assign(examples.begin(), examples.end());
  result.assignment.assign(examples.size(), -1);
  if (examples.empty()) return result;

  // Group by shape, canonically sorted, remembering original indices.
  std::map<Shape, std::vector<int>> groups;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    groups[shape_of(examples[i])].push_back(static_cast<int>(i));
  }
  for (auto& [shape, idxs] : groups) {
    std::stable_sort(idxs.begin(), idxs.end(), [&](int a, int b) {
      return example_key(examples[a]) < example_key(examples[b]);
    });
  }

  for (auto& [shape, idxs] : groups) {
    std::vector<Example> group;
    group.reserve(idxs.size());
    for (int i : idxs) group.push_back(examples[i]);

    std::vector<std::pair<std::vector<int>, SymbolicRule>> blocks;
    if (static_cast<int>(group.size()) <= max_group) {
      blocks = partition_group_exact(group, cfg);
    } else {
      blocks = partition_group_greedy(group, cfg);
      result.used_greedy = true;
    }
    for (auto& [members, rule] : blocks) {
      int rule_index = static_cast<int>(result.rules.size());
      result.rules.push_back(std::move(rule));
      for (int local : members) {
        result.assignment[idxs[local]] = rule_index;
      }
    }
  }

  for (std::size_t i = 0; i < result.assignment.size(); ++i) {
    if (result.assignment[i] < 0) {
      result.unexplained.push_back(static_cast<int>(i));
    }
  }
  return result;
}

}  // namespace cmdfix
