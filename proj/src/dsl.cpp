#include "cmdfix/dsl.hpp"

#include <cctype>

namespace cmdfix {

namespace {

bool is_space(char ch) {
  return std::isspace(static_cast<unsigned char>(ch)) != 0;
}

}  // namespace

TokenSeq tokenize(std::string_view line) {
  TokenSeq out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

std::string join(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

bool is_valid_token(std::string_view text) {
  if (text.empty()) return false;
  for (char ch : text) {
    if (is_space(ch)) return false;
  }
  return true;
}

std::vector<int> indices(std::string_view s, char c) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == c) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::optional<int> eval_pos(const PosExpr& p, std::string_view s, Side side) {
  const int n = static_cast<int>(s.size());
  if (p.kind == PosExpr::Kind::Ipos) {
    if (p.k > 0) return p.k;
    if (p.k < 0) {
      int idx = n + p.k;
      if (idx < 0) return std::nullopt;
      return idx;
    }
    return side == Side::Left ? 0 : n;
  }
  // Cpos
  if (p.k == 0) return std::nullopt;
  std::vector<int> occ = indices(s, p.c);
  const int count = static_cast<int>(occ.size());
  int base;
  if (p.k > 0) {
    if (count < p.k) return std::nullopt;
    base = occ[p.k - 1];
  } else {
    if (count + p.k < 0) return std::nullopt;
    base = occ[count + p.k];
  }
  int idx = base + p.delta;
  if (idx < 0) return std::nullopt;
  return idx;
}

std::optional<std::string> substr(std::string_view s, int left, int right) {
  const int n = static_cast<int>(s.size());
  if (left < 0 || left > right || right > n) return std::nullopt;
  return std::string(s.substr(left, right - left));
}

std::optional<Substitution> match_expr(const MatchExpr& m, const Token& tok) {
  if (const auto* cs = std::get_if<ConstStr>(&m)) {
    if (cs->text == tok) return Substitution{};
    return std::nullopt;
  }
  const auto& vm = std::get<VarMatch>(m);
  if (vm.prefix.size() + vm.suffix.size() > tok.size()) return std::nullopt;
  std::string_view view = tok;
  if (!view.starts_with(vm.prefix) || !view.ends_with(vm.suffix)) {
    return std::nullopt;
  }
  Substitution sub;
  sub.emplace(vm.index, tok);
  return sub;
}

std::optional<Substitution> unify(std::span<const MatchExpr> exprs,
                                  const TokenSeq& tokens) {
  if (exprs.size() != tokens.size()) return std::nullopt;
  Substitution out;
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    auto sub = match_expr(exprs[i], tokens[i]);
    if (!sub) return std::nullopt;
    for (auto& [index, value] : *sub) {
      auto [it, inserted] = out.emplace(index, std::move(value));
      if (!inserted) return std::nullopt;  // duplicate variable index
    }
  }
  return out;
}

std::optional<std::string> eval_fix_expr(const FixExpr& f,
                                         const Substitution& sub) {
  if (const auto* fs = std::get_if<FStr>(&f)) {
    if (fs->text.empty()) return std::nullopt;
    return fs->text;
  }
  const auto& sl = std::get<SubLr>(f);
  auto bound = sub.find(sl.var_index);
  if (bound == sub.end()) return std::nullopt;
  const std::string& s = bound->second;
  auto left = eval_pos(sl.left_pos, s, Side::Left);
  auto right = eval_pos(sl.right_pos, s, Side::Right);
  if (!left || !right) return std::nullopt;
  auto middle = substr(s, *left, *right);
  if (!middle) return std::nullopt;
  std::string out = sl.prefix + *middle + sl.suffix;
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<TokenSeq> eval_rule(const ConcreteRule& r, const TokenSeq& cmd,
                                  const TokenSeq& err) {
  auto cmd_sub = unify(r.cmd_match, cmd);
  if (!cmd_sub) return std::nullopt;
  auto err_sub = unify(r.err_match, err);
  if (!err_sub) return std::nullopt;
  Substitution sub = std::move(*cmd_sub);
  for (auto& [index, value] : *err_sub) {
    auto [it, inserted] = sub.emplace(index, std::move(value));
    if (!inserted) return std::nullopt;
  }
  TokenSeq out;
  out.reserve(r.fix.size());
  for (const FixExpr& f : r.fix) {
    auto piece = eval_fix_expr(f, sub);
    if (!piece) return std::nullopt;
    out.push_back(std::move(*piece));
  }
  return out;
}

}  // namespace cmdfix
