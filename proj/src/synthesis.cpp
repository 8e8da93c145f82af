#include "cmdfix/synthesis.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace cmdfix {

namespace {

std::string longest_common_prefix(const std::string& a, const std::string& b) {
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return a.substr(0, i);
}

std::string longest_common_suffix(const std::string& a, const std::string& b) {
  std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[a.size() - 1 - i] == b[b.size() - 1 - i]) ++i;
  return a.substr(a.size() - i);
}

// Longest common prefix/suffix over a binding list, with the suffix trimmed
// until |prefix| + |suffix| fits the shortest binding, so every binding seen
// so far still matches the variable.
std::pair<std::string, std::string> derive_affixes(
    const std::vector<std::string>& bindings) {
  assert(!bindings.empty());
  std::string prefix = bindings.front();
  std::string suffix = bindings.front();
  std::size_t min_len = bindings.front().size();
  for (std::size_t i = 1; i < bindings.size(); ++i) {
    prefix = longest_common_prefix(prefix, bindings[i]);
    suffix = longest_common_suffix(suffix, bindings[i]);
    min_len = std::min(min_len, bindings[i].size());
  }
  if (prefix.size() + suffix.size() > min_len) {
    std::size_t keep = min_len - prefix.size();  // prefix <= min_len always
    suffix = suffix.substr(suffix.size() - keep);
  }
  return {std::move(prefix), std::move(suffix)};
}

void sort_unique(std::vector<PosPair>& pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
}

// Position expressions evaluating to index k on s, for the given side.
void ipos_encodings(int k, int n, Side side, std::vector<PosExpr>& out) {
  if (side == Side::Left) {
    if (k == 0) {
      out.push_back(PosExpr::ipos(0));
      out.push_back(PosExpr::ipos(-n));
    } else {
      out.push_back(PosExpr::ipos(k));
      if (k < n) out.push_back(PosExpr::ipos(k - n));
    }
  } else {
    if (k == n) {
      out.push_back(PosExpr::ipos(0));
      out.push_back(PosExpr::ipos(n));
    } else {
      if (k > 0) out.push_back(PosExpr::ipos(k));
      out.push_back(PosExpr::ipos(k - n));
    }
  }
}

void cpos_encodings(int k, std::string_view s, const SynthConfig& cfg,
                    std::vector<PosExpr>& out) {
  const int n = static_cast<int>(s.size());
  for (int delta = -cfg.max_offset; delta <= cfg.max_offset; ++delta) {
    int p = k - delta;
    if (p < 0 || p >= n) continue;
    char c = s[p];
    int before = 0;
    int total = 0;
    for (int i = 0; i < n; ++i) {
      if (s[i] == c) {
        ++total;
        if (i < p) ++before;
      }
    }
    out.push_back(PosExpr::cpos(c, before + 1, delta));
    out.push_back(PosExpr::cpos(c, before - total, delta));
  }
}

std::vector<PosExpr> encodings(int k, std::string_view s, Side side,
                               const SynthConfig& cfg) {
  std::vector<PosExpr> out;
  ipos_encodings(k, static_cast<int>(s.size()), side, out);
  cpos_encodings(k, s, cfg, out);
  return out;
}

std::optional<std::string> eval_candidate(const SubLrKey& key,
                                          const PosPair& pair,
                                          const std::string& bound) {
  auto left = eval_pos(pair.first, bound, Side::Left);
  auto right = eval_pos(pair.second, bound, Side::Right);
  if (!left || !right) return std::nullopt;
  auto middle = substr(bound, *left, *right);
  if (!middle) return std::nullopt;
  return key.prefix + *middle + key.suffix;
}

bool candidate_fits(const SubLrKey& key, const PosPair& pair, const Example& e,
                    int fix_pos) {
  if (key.var_index < 0 || key.var_index >= input_size(e)) return false;
  auto produced = eval_candidate(key, pair, token_at(e, key.var_index));
  return produced && *produced == e.fix[fix_pos];
}

// Drops every pair that does not reproduce e.fix[fix_pos]; erases emptied
// keys.
void filter_against(CandidateSet& cs, const Example& e, int fix_pos) {
  for (auto it = cs.entries.begin(); it != cs.entries.end();) {
    auto& pairs = it->second;
    pairs.erase(std::remove_if(pairs.begin(), pairs.end(),
                               [&](const PosPair& pp) {
                                 return !candidate_fits(it->first, pp, e,
                                                        fix_pos);
                               }),
                pairs.end());
    if (pairs.empty()) {
      it = cs.entries.erase(it);
    } else {
      ++it;
    }
  }
}

void merge_entries(CandidateSet& into, CandidateSet&& from) {
  for (auto& [key, pairs] : from.entries) {
    auto& slot = into.entries[key];
    slot.insert(slot.end(), pairs.begin(), pairs.end());
    sort_unique(slot);
  }
}

AffixLimit common_output_affixes(std::span<const Example> examples,
                                 int fix_pos) {
  std::string prefix = examples.front().fix[fix_pos];
  std::string suffix = prefix;
  for (std::size_t i = 1; i < examples.size(); ++i) {
    prefix = longest_common_prefix(prefix, examples[i].fix[fix_pos]);
    suffix = longest_common_suffix(suffix, examples[i].fix[fix_pos]);
  }
  return AffixLimit{static_cast<int>(prefix.size()),
                    static_cast<int>(suffix.size())};
}

std::set<int> vars_of(const SymbolicRule& r) {
  std::set<int> out;
  for (const auto* list : {&r.cmd_match, &r.err_match}) {
    for (const auto& component : *list) {
      if (const auto* var = std::get_if<VarComponent>(&component)) {
        out.insert(var->index);
      }
    }
  }
  return out;
}

}  // namespace

Example make_example(std::string_view cmd, std::string_view err,
                     std::string_view fix) {
  return Example{tokenize(cmd), tokenize(err), tokenize(fix)};
}

const std::string& token_at(const Example& e, int concat_index) {
  const int cmd_len = static_cast<int>(e.cmd.size());
  assert(concat_index >= 0 && concat_index < input_size(e));
  if (concat_index < cmd_len) return e.cmd[concat_index];
  return e.err[concat_index - cmd_len];
}

int input_size(const Example& e) {
  return static_cast<int>(e.cmd.size() + e.err.size());
}

std::size_t CandidateSet::total_pairs() const {
  std::size_t total = 0;
  for (const auto& [key, pairs] : entries) total += pairs.size();
  return total;
}

bool CandidateSet::contains(const SubLr& expr) const {
  auto it = entries.find(SubLrKey{expr.var_index, expr.prefix, expr.suffix});
  if (it == entries.end()) return false;
  PosPair pair{expr.left_pos, expr.right_pos};
  return std::binary_search(it->second.begin(), it->second.end(), pair);
}

SubLr make_sublr(const SubLrKey& key, const PosPair& pair) {
  return SubLr{pair.first, pair.second, key.prefix, key.suffix,
               key.var_index};
}

SymbolicRule const_rule(const Example& e) {
  SymbolicRule r;
  for (const auto& tok : e.cmd) r.cmd_match.emplace_back(FixedTok{tok});
  for (const auto& tok : e.err) r.err_match.emplace_back(FixedTok{tok});
  for (const auto& tok : e.fix) r.fix.emplace_back(FixedStr{tok});
  r.example_count = 1;
  return r;
}

std::optional<FindVarsResult> find_variables(
    const TokenSeq& tokens, std::span<const SymbolicMatchComponent> components,
    int offset, int prior_count) {
  if (tokens.size() != components.size()) return std::nullopt;
  FindVarsResult result;
  result.components.reserve(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) {
    const std::string& tok = tokens[i];
    if (const auto* fixed = std::get_if<FixedTok>(&components[i])) {
      if (fixed->text == tok) {
        result.components.emplace_back(*fixed);
        continue;
      }
      VarComponent var;
      var.index = offset + static_cast<int>(i);
      var.bindings.assign(prior_count, fixed->text);
      var.bindings.push_back(tok);
      auto [prefix, suffix] = derive_affixes(var.bindings);
      var.prefix = std::move(prefix);
      var.suffix = std::move(suffix);
      result.vars.insert(var.index);
      result.components.emplace_back(std::move(var));
    } else {
      VarComponent var = std::get<VarComponent>(components[i]);
      var.bindings.push_back(tok);
      auto [prefix, suffix] = derive_affixes(var.bindings);
      var.prefix = std::move(prefix);
      var.suffix = std::move(suffix);
      result.vars.insert(var.index);
      result.components.emplace_back(std::move(var));
    }
  }
  return result;
}

CandidateSet all_substrings(const Example& e, const std::set<int>& vars,
                            int fix_pos, const SynthConfig& cfg,
                            const AffixLimit* limit) {
  CandidateSet out;
  const std::string& target = e.fix[fix_pos];
  const int t_len = static_cast<int>(target.size());
  for (int var_index : vars) {
    if (var_index < 0 || var_index >= input_size(e)) continue;
    const std::string& bound = token_at(e, var_index);
    for (int a = 0; a <= t_len; ++a) {
      if (limit && a > limit->max_prefix) break;
      for (int b = a + 1; b <= t_len; ++b) {  // non-empty extracted middle
        if (limit && t_len - b > limit->max_suffix) continue;
        std::string_view middle =
            std::string_view(target).substr(a, b - a);
        SubLrKey key{var_index, target.substr(0, a), target.substr(b)};
        std::vector<PosPair>* slot = nullptr;
        for (std::size_t at = bound.find(middle); at != std::string::npos;
             at = bound.find(middle, at + 1)) {
          int k1 = static_cast<int>(at);
          int k2 = k1 + static_cast<int>(middle.size());
          auto lefts = encodings(k1, bound, Side::Left, cfg);
          auto rights = encodings(k2, bound, Side::Right, cfg);
          if (!slot) slot = &out.entries[key];
          for (const PosExpr& pl : lefts) {
            for (const PosExpr& pr : rights) {
              slot->emplace_back(pl, pr);
            }
          }
        }
      }
    }
  }
  for (auto it = out.entries.begin(); it != out.entries.end();) {
    sort_unique(it->second);
    it = it->second.empty() ? out.entries.erase(it) : std::next(it);
  }
  return out;
}

CandidateSet synth_substrings(std::span<const Example> examples,
                              const std::set<int>& vars, int fix_pos,
                              const SynthConfig& cfg) {
  assert(!examples.empty());
  AffixLimit limit = common_output_affixes(examples, fix_pos);
  CandidateSet out = all_substrings(examples.front(), vars, fix_pos, cfg,
                                    &limit);
  for (std::size_t i = 1; i < examples.size(); ++i) {
    filter_against(out, examples[i], fix_pos);
  }
  for (const Example& e : examples) out.bindings.push_back(e.fix[fix_pos]);
  return out;
}

std::optional<std::vector<SymbolicFixComponent>> synth_fix(
    const TokenSeq& fix_tokens, std::span<const SymbolicFixComponent> fix,
    std::span<const Example> examples, const std::set<int>& vars,
    const SynthConfig& cfg) {
  if (fix_tokens.size() != fix.size()) return std::nullopt;
  std::vector<SymbolicFixComponent> out;
  out.reserve(fix.size());
  for (std::size_t i = 0; i < fix.size(); ++i) {
    const auto* fixed = std::get_if<FixedStr>(&fix[i]);
    if (fixed && fixed->text == fix_tokens[i]) {
      out.emplace_back(*fixed);
      continue;
    }
    CandidateSet cs =
        synth_substrings(examples, vars, static_cast<int>(i), cfg);
    if (cs.empty()) return std::nullopt;
    out.emplace_back(std::move(cs));
  }
  return out;
}

std::optional<SymbolicRule> refine_rule(const SymbolicRule& r,
                                        std::span<const Example> priors,
                                        const Example& e,
                                        const SynthConfig& cfg) {
  auto cmd_result = find_variables(e.cmd, r.cmd_match, 0, r.example_count);
  if (!cmd_result) return std::nullopt;
  auto err_result = find_variables(e.err, r.err_match,
                                   static_cast<int>(e.cmd.size()),
                                   r.example_count);
  if (!err_result) return std::nullopt;
  if (e.fix.size() != r.fix.size()) return std::nullopt;

  std::set<int> all_vars = cmd_result->vars;
  all_vars.insert(err_result->vars.begin(), err_result->vars.end());
  std::set<int> prior_vars = vars_of(r);
  std::set<int> new_vars;
  std::set_difference(all_vars.begin(), all_vars.end(), prior_vars.begin(),
                      prior_vars.end(),
                      std::inserter(new_vars, new_vars.end()));

  // Newest example first: it seeds fresh enumeration, the rest filter.
  std::vector<Example> chain;
  chain.reserve(priors.size() + 1);
  chain.push_back(e);
  chain.insert(chain.end(), priors.begin(), priors.end());

  SymbolicRule out;
  out.cmd_match = std::move(cmd_result->components);
  out.err_match = std::move(err_result->components);
  out.example_count = r.example_count + 1;
  out.fix.reserve(r.fix.size());

  for (std::size_t i = 0; i < r.fix.size(); ++i) {
    const int pos = static_cast<int>(i);
    if (const auto* fixed = std::get_if<FixedStr>(&r.fix[i])) {
      if (fixed->text == e.fix[i]) {
        out.fix.emplace_back(*fixed);
        continue;
      }
      // Newly promoted position: enumerate over every variable.
      CandidateSet cs = synth_substrings(chain, all_vars, pos, cfg);
      if (cs.empty()) return std::nullopt;
      cs.bindings.assign(r.example_count, fixed->text);
      cs.bindings.push_back(e.fix[i]);
      out.fix.emplace_back(std::move(cs));
    } else {
      // Existing candidates: filter against the new example; enumerate
      // fresh expressions only over newly promoted variables.
      CandidateSet cs = std::get<CandidateSet>(r.fix[i]);
      std::vector<std::string> bindings = std::move(cs.bindings);
      cs.bindings.clear();
      filter_against(cs, e, pos);
      if (!new_vars.empty()) {
        CandidateSet fresh = synth_substrings(chain, new_vars, pos, cfg);
        fresh.bindings.clear();
        merge_entries(cs, std::move(fresh));
      }
      if (cs.empty()) return std::nullopt;
      bindings.push_back(e.fix[i]);
      cs.bindings = std::move(bindings);
      out.fix.emplace_back(std::move(cs));
    }
  }
  return out;
}

std::optional<SymbolicRule> refine_rule(const SymbolicRule& r,
                                        const Example& e,
                                        const SynthConfig& cfg) {
  std::vector<Example> priors = reconstruct_examples(r);
  return refine_rule(r, priors, e, cfg);
}

std::vector<Example> reconstruct_examples(const SymbolicRule& r) {
  std::vector<Example> out(r.example_count);
  auto fill = [&](const std::vector<SymbolicMatchComponent>& components,
                  TokenSeq Example::*field) {
    for (const auto& component : components) {
      if (const auto* fixed = std::get_if<FixedTok>(&component)) {
        for (auto& e : out) (e.*field).push_back(fixed->text);
      } else {
        const auto& var = std::get<VarComponent>(component);
        assert(var.bindings.size() == out.size());
        for (std::size_t j = 0; j < out.size(); ++j) {
          (out[j].*field).push_back(var.bindings[j]);
        }
      }
    }
  };
  fill(r.cmd_match, &Example::cmd);
  fill(r.err_match, &Example::err);
  for (const auto& component : r.fix) {
    if (const auto* fixed = std::get_if<FixedStr>(&component)) {
      for (auto& e : out) e.fix.push_back(fixed->text);
    } else {
      const auto& cs = std::get<CandidateSet>(component);
      assert(cs.bindings.size() == out.size());
      for (std::size_t j = 0; j < out.size(); ++j) {
        out[j].fix.push_back(cs.bindings[j]);
      }
    }
  }
  return out;
}

std::optional<SymbolicRule> synth_rules(std::span<const Example> examples,
                                        const SynthConfig& cfg) {
  if (examples.empty()) return std::nullopt;
  SymbolicRule rule = const_rule(examples.front());
  for (std::size_t i = 1; i < examples.size(); ++i) {
    auto refined = refine_rule(rule, examples.subspan(0, i), examples[i], cfg);
    if (!refined) return std::nullopt;
    rule = std::move(*refined);
  }
  return rule;
}

RuleCount count_concrete(const SymbolicRule& r) {
  RuleCount total = 1;
  for (const auto& component : r.fix) {
    if (const auto* cs = std::get_if<CandidateSet>(&component)) {
      total *= RuleCount(cs->total_pairs());
    }
  }
  return total;
}

bool rank_less(const SubLr& a, const SubLr& b) {
  auto pos_key = [](const PosExpr& p) {
    return std::tuple(p.kind == PosExpr::Kind::Cpos ? 1 : 0, std::abs(p.k),
                      p.k < 0 ? 1 : 0, std::abs(p.delta),
                      p.delta < 0 ? 1 : 0, p.c, p.k, p.delta);
  };
  if (a.var_index != b.var_index) return a.var_index < b.var_index;
  auto left_a = pos_key(a.left_pos);
  auto left_b = pos_key(b.left_pos);
  if (left_a != left_b) return left_a < left_b;
  auto right_a = pos_key(a.right_pos);
  auto right_b = pos_key(b.right_pos);
  if (right_a != right_b) return right_a < right_b;
  if (a.prefix != b.prefix) return a.prefix < b.prefix;
  return a.suffix < b.suffix;
}

std::vector<SubLr> flatten_candidates(const CandidateSet& cs) {
  std::vector<SubLr> out;
  out.reserve(cs.total_pairs());
  for (const auto& [key, pairs] : cs.entries) {
    for (const PosPair& pair : pairs) out.push_back(make_sublr(key, pair));
  }
  std::sort(out.begin(), out.end(), rank_less);
  return out;
}

namespace {

std::vector<MatchExpr> concretize_match(
    const std::vector<SymbolicMatchComponent>& components) {
  std::vector<MatchExpr> out;
  out.reserve(components.size());
  for (const auto& component : components) {
    if (const auto* fixed = std::get_if<FixedTok>(&component)) {
      out.emplace_back(ConstStr{fixed->text});
    } else {
      const auto& var = std::get<VarComponent>(component);
      out.emplace_back(VarMatch{var.index, var.prefix, var.suffix});
    }
  }
  return out;
}

}  // namespace

Concretizer::Concretizer(const SymbolicRule& r)
    : cmd_match_(concretize_match(r.cmd_match)),
      err_match_(concretize_match(r.err_match)) {
  options_.reserve(r.fix.size());
  for (const auto& component : r.fix) {
    std::vector<FixExpr> opts;
    if (const auto* fixed = std::get_if<FixedStr>(&component)) {
      opts.emplace_back(FStr{fixed->text});
    } else {
      for (const SubLr& expr :
           flatten_candidates(std::get<CandidateSet>(component))) {
        opts.emplace_back(expr);
      }
    }
    if (opts.empty()) done_ = true;
    options_.push_back(std::move(opts));
  }
  cursor_.assign(options_.size(), 0);
}

std::optional<ConcreteRule> Concretizer::next() {
  if (done_) return std::nullopt;
  ConcreteRule rule;
  rule.cmd_match = cmd_match_;
  rule.err_match = err_match_;
  rule.fix.reserve(options_.size());
  for (std::size_t i = 0; i < options_.size(); ++i) {
    rule.fix.push_back(options_[i][cursor_[i]]);
  }
  // Advance the odometer, last position fastest.
  done_ = true;
  for (std::size_t i = options_.size(); i-- > 0;) {
    if (++cursor_[i] < options_[i].size()) {
      done_ = false;
      break;
    }
    cursor_[i] = 0;
  }
  if (options_.empty()) done_ = true;  // single empty product
  return rule;
}

std::vector<ConcreteRule> concretize(const SymbolicRule& r, std::size_t cap) {
  std::vector<ConcreteRule> out;
  Concretizer stream(r);
  while (out.size() < cap) {
    auto rule = stream.next();
    if (!rule) break;
    out.push_back(std::move(*rule));
  }
  return out;
}

std::optional<ConcreteRule> rank_select(const SymbolicRule& r) {
  ConcreteRule rule;
  rule.cmd_match = concretize_match(r.cmd_match);
  rule.err_match = concretize_match(r.err_match);
  rule.fix.reserve(r.fix.size());
  for (const auto& component : r.fix) {
    if (const auto* fixed = std::get_if<FixedStr>(&component)) {
      rule.fix.emplace_back(FStr{fixed->text});
      continue;
    }
    const auto& cs = std::get<CandidateSet>(component);
    std::optional<SubLr> best;
    for (const auto& [key, pairs] : cs.entries) {
      for (const PosPair& pair : pairs) {
        SubLr expr = make_sublr(key, pair);
        if (!best || rank_less(expr, *best)) best = std::move(expr);
      }
    }
    if (!best) return std::nullopt;
    rule.fix.emplace_back(std::move(*best));
  }
  return rule;
}

std::optional<TokenSeq> apply_symbolic(const SymbolicRule& r,
                                       const TokenSeq& cmd,
                                       const TokenSeq& err) {
  auto rule = rank_select(r);
  if (!rule) return std::nullopt;
  return eval_rule(*rule, cmd, err);
}

SymbolicRule canonical_form(const SymbolicRule& r) {
  std::vector<Example> examples = reconstruct_examples(r);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  auto sort_key = [&](std::size_t i) {
    return join(examples[i].cmd) + '\n' + join(examples[i].err) + '\n' +
           join(examples[i].fix);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return sort_key(a) < sort_key(b);
                   });
  auto permute = [&](std::vector<std::string>& bindings) {
    std::vector<std::string> next;
    next.reserve(bindings.size());
    for (std::size_t i : order) next.push_back(bindings[i]);
    bindings = std::move(next);
  };
  SymbolicRule out = r;
  for (auto* list : {&out.cmd_match, &out.err_match}) {
    for (auto& component : *list) {
      if (auto* var = std::get_if<VarComponent>(&component)) {
        permute(var->bindings);
      }
    }
  }
  for (auto& component : out.fix) {
    if (auto* cs = std::get_if<CandidateSet>(&component)) {
      permute(cs->bindings);
    }
  }
  return out;
}

int specificity(const SymbolicRule& r) {
  int count = 0;
  for (const auto* list : {&r.cmd_match, &r.err_match}) {
    for (const auto& component : *list) {
      if (std::holds_alternative<FixedTok>(component)) ++count;
    }
  }
  return count;
}

}  // namespace cmdfix
