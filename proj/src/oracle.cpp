#include "cmdfix/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <string>

namespace cmdfix {

namespace {

std::vector<PosExpr> bounded_pos_exprs(const std::string& bound,
                                       const OracleBounds& bounds) {
  std::vector<PosExpr> out;
  for (int k = -bounds.max_abs_k; k <= bounds.max_abs_k; ++k) {
    out.push_back(PosExpr::ipos(k));
  }
  std::string seen;
  for (char c : bound) {
    if (seen.find(c) != std::string::npos) continue;
    seen.push_back(c);
    for (int k = -bounds.max_abs_k; k <= bounds.max_abs_k; ++k) {
      if (k == 0) continue;
      for (int d = -bounds.max_abs_delta; d <= bounds.max_abs_delta; ++d) {
        out.push_back(PosExpr::cpos(c, k, d));
      }
    }
  }
  return out;
}

// Position expressions bucketed by the index they evaluate to on one string.
using IndexBuckets = std::map<int, std::vector<PosExpr>>;

struct SideBuckets {
  IndexBuckets left;
  IndexBuckets right;
};

// Bucketing one string is pure preprocessing, shared across fix positions.
class BucketCache {
 public:
  explicit BucketCache(const OracleBounds& bounds) : bounds_(bounds) {}

  const SideBuckets& get(const std::string& bound) {
    auto it = by_string_.find(bound);
    if (it != by_string_.end()) return it->second;
    SideBuckets buckets;
    for (const PosExpr& p : bounded_pos_exprs(bound, bounds_)) {
      if (auto idx = eval_pos(p, bound, Side::Left)) {
        buckets.left[*idx].push_back(p);
      }
      if (auto idx = eval_pos(p, bound, Side::Right)) {
        buckets.right[*idx].push_back(p);
      }
    }
    return by_string_.emplace(bound, std::move(buckets)).first->second;
  }

 private:
  OracleBounds bounds_;
  std::map<std::string, SideBuckets> by_string_;
};

std::optional<std::string> eval_sublr(const SubLr& expr,
                                      const std::string& bound) {
  auto left = eval_pos(expr.left_pos, bound, Side::Left);
  auto right = eval_pos(expr.right_pos, bound, Side::Right);
  if (!left || !right) return std::nullopt;
  auto middle = substr(bound, *left, *right);
  if (!middle) return std::nullopt;
  return expr.prefix + *middle + expr.suffix;
}

bool consistent_everywhere(const SubLr& expr,
                           std::span<const Example> examples, int fix_pos) {
  for (const Example& e : examples) {
    if (expr.var_index < 0 || expr.var_index >= input_size(e)) return false;
    auto produced = eval_sublr(expr, token_at(e, expr.var_index));
    if (!produced || *produced != e.fix[fix_pos]) return false;
  }
  return true;
}

std::vector<SubLr> brute_substrings_cached(std::span<const Example> examples,
                                           const std::set<int>& vars,
                                           int fix_pos, BucketCache& cache) {
  assert(!examples.empty());
  std::vector<SubLr> out;
  const Example& first = examples.front();
  const std::string& target = first.fix[fix_pos];
  const int t_len = static_cast<int>(target.size());
  auto rest = examples.subspan(1);
  for (int var_index : vars) {
    if (var_index < 0 || var_index >= input_size(first)) continue;
    const std::string& bound = token_at(first, var_index);
    const SideBuckets& buckets = cache.get(bound);
    for (int a = 0; a <= t_len; ++a) {
      for (int b = a + 1; b <= t_len; ++b) {
        std::string_view middle = std::string_view(target).substr(a, b - a);
        std::string prefix = target.substr(0, a);
        std::string suffix = target.substr(b);
        for (std::size_t at = bound.find(middle); at != std::string::npos;
             at = bound.find(middle, at + 1)) {
          auto left_bucket = buckets.left.find(static_cast<int>(at));
          auto right_bucket =
              buckets.right.find(static_cast<int>(at + middle.size()));
          if (left_bucket == buckets.left.end() ||
              right_bucket == buckets.right.end()) {
            continue;
          }
          for (const PosExpr& pl : left_bucket->second) {
            for (const PosExpr& pr : right_bucket->second) {
              SubLr expr{pl, pr, prefix, suffix, var_index};
              if (consistent_everywhere(expr, rest, fix_pos)) {
                out.push_back(std::move(expr));
              }
            }
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

OracleBounds OracleBounds::for_examples(std::span<const Example> examples,
                                        int max_delta) {
  std::size_t longest = 1;
  for (const Example& e : examples) {
    for (const auto* seq : {&e.cmd, &e.err, &e.fix}) {
      for (const auto& tok : *seq) longest = std::max(longest, tok.size());
    }
  }
  return OracleBounds{static_cast<int>(longest), max_delta};
}

std::vector<SubLr> brute_substrings(std::span<const Example> examples,
                                    const std::set<int>& vars, int fix_pos,
                                    const OracleBounds& bounds) {
  BucketCache cache(bounds);
  return brute_substrings_cached(examples, vars, fix_pos, cache);
}

std::vector<SubLr> sorted_candidates(const CandidateSet& cs) {
  std::vector<SubLr> out;
  out.reserve(cs.total_pairs());
  for (const auto& [key, pairs] : cs.entries) {
    for (const PosPair& pair : pairs) out.push_back(make_sublr(key, pair));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<SymbolicRule> nonlazy_synth(std::span<const Example> examples,
                                          const SynthConfig& cfg) {
  if (examples.empty()) return std::nullopt;
  const Example& first = examples.front();
  for (const Example& e : examples) {
    if (e.cmd.size() != first.cmd.size() || e.err.size() != first.err.size() ||
        e.fix.size() != first.fix.size()) {
      return std::nullopt;
    }
  }

  SymbolicRule rule;
  rule.example_count = static_cast<int>(examples.size());
  auto promote_all = [&](std::size_t len, int offset, bool from_cmd) {
    std::vector<SymbolicMatchComponent> components;
    components.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      VarComponent var;
      var.index = offset + static_cast<int>(i);
      for (const Example& e : examples) {
        var.bindings.push_back(from_cmd ? e.cmd[i] : e.err[i]);
      }
      std::string prefix = var.bindings.front();
      std::string suffix = var.bindings.front();
      std::size_t min_len = prefix.size();
      for (std::size_t j = 1; j < var.bindings.size(); ++j) {
        const std::string& b = var.bindings[j];
        std::size_t p = 0;
        while (p < std::min(prefix.size(), b.size()) && prefix[p] == b[p]) ++p;
        prefix.resize(p);
        std::size_t s = 0;
        while (s < std::min(suffix.size(), b.size()) &&
               suffix[suffix.size() - 1 - s] == b[b.size() - 1 - s]) {
          ++s;
        }
        suffix = suffix.substr(suffix.size() - s);
        min_len = std::min(min_len, b.size());
      }
      if (prefix.size() + suffix.size() > min_len) {
        std::size_t keep = min_len - prefix.size();
        suffix = suffix.substr(suffix.size() - keep);
      }
      var.prefix = std::move(prefix);
      var.suffix = std::move(suffix);
      components.emplace_back(std::move(var));
    }
    return components;
  };
  rule.cmd_match = promote_all(first.cmd.size(), 0, true);
  rule.err_match = promote_all(first.err.size(),
                               static_cast<int>(first.cmd.size()), false);

  std::set<int> vars;
  for (int i = 0; i < input_size(first); ++i) vars.insert(i);
  OracleBounds bounds = OracleBounds::for_examples(examples, cfg.max_offset);
  BucketCache cache(bounds);

  rule.fix.reserve(first.fix.size());
  for (std::size_t i = 0; i < first.fix.size(); ++i) {
    auto exprs = brute_substrings_cached(examples, vars,
                                         static_cast<int>(i), cache);
    if (exprs.empty()) return std::nullopt;
    CandidateSet cs;
    for (const SubLr& expr : exprs) {
      cs.entries[SubLrKey{expr.var_index, expr.prefix, expr.suffix}]
          .emplace_back(expr.left_pos, expr.right_pos);
    }
    for (auto& [key, pairs] : cs.entries) {
      std::sort(pairs.begin(), pairs.end());
      pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    }
    for (const Example& e : examples) cs.bindings.push_back(e.fix[i]);
    rule.fix.emplace_back(std::move(cs));
  }
  return rule;
}

}  // namespace cmdfix
