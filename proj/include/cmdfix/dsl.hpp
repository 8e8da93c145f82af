#pragma once

// Core rule language: token sequences, match/fix/position expressions and
// their evaluation semantics. Everything here is an immutable value type and
// every function is pure, so unrestricted concurrent use is fine.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cmdfix {

using Token = std::string;
using TokenSeq = std::vector<std::string>;

// Splits on maximal runs of whitespace. Joining the result with single
// spaces and re-tokenizing is the identity.
TokenSeq tokenize(std::string_view line);

// Joins tokens with single spaces.
std::string join(const TokenSeq& tokens);

// Non-empty and free of whitespace.
bool is_valid_token(std::string_view text);

// Strictly increasing list of every position p with s[p] == c.
std::vector<int> indices(std::string_view s, char c);

enum class Side { Left, Right };

// Position expression: an index into a bound string. Either an absolute
// index (possibly counted from the end) or an offset from the k-th
// occurrence of a character.
struct PosExpr {
  enum class Kind : std::uint8_t { Ipos, Cpos };

  Kind kind = Kind::Ipos;
  int k = 0;
  char c = '\0';  // Cpos only
  int delta = 0;  // Cpos only

  static PosExpr ipos(int k) { return PosExpr{Kind::Ipos, k, '\0', 0}; }
  static PosExpr cpos(char c, int k, int delta) {
    return PosExpr{Kind::Cpos, k, c, delta};
  }

  auto operator<=>(const PosExpr&) const = default;
};

// Evaluates a position expression against a string. Ipos(k): k when k>0,
// |s|+k when k<0 (undefined below 0), and 0 or |s| for k=0 depending on the
// side. Cpos(c,k,delta): the k-th occurrence of c from the front (k>0) or
// back (k<0), shifted by delta; undefined when the occurrence does not exist
// or the shifted index is negative.
std::optional<int> eval_pos(const PosExpr& p, std::string_view s, Side side);

// Half-open slice [left, right), defined iff 0 <= left <= right <= |s|.
std::optional<std::string> substr(std::string_view s, int left, int right);

// Match expressions: a constant token or a variable with required prefix
// and suffix.
struct ConstStr {
  std::string text;
  auto operator<=>(const ConstStr&) const = default;
};

struct VarMatch {
  int index = 0;  // 0-based position in cmd @ err
  std::string prefix;
  std::string suffix;
  auto operator<=>(const VarMatch&) const = default;
};

using MatchExpr = std::variant<ConstStr, VarMatch>;

// Fix expressions: a constant token or a substring extraction wrapped with
// constant strings.
struct FStr {
  std::string text;
  auto operator<=>(const FStr&) const = default;
};

struct SubLr {
  PosExpr left_pos;
  PosExpr right_pos;
  std::string prefix;
  std::string suffix;
  int var_index = 0;
  auto operator<=>(const SubLr&) const = default;
};

using FixExpr = std::variant<FStr, SubLr>;

struct ConcreteRule {
  std::vector<MatchExpr> cmd_match;
  std::vector<MatchExpr> err_match;
  std::vector<FixExpr> fix;
  bool operator==(const ConcreteRule&) const = default;
};

// Partial map from variable index to the matched token.
using Substitution = std::map<int, std::string>;

// ConstStr: empty substitution iff the token equals the constant.
// VarMatch(i,l,r): {i -> t} iff l is a prefix of t, r is a suffix of t and
// |l|+|r| <= |t|.
std::optional<Substitution> match_expr(const MatchExpr& m, const Token& tok);

// Unifies a match list against a token list of the same length; the union
// of the per-position substitutions, undefined on any mismatch.
std::optional<Substitution> unify(std::span<const MatchExpr> exprs,
                                  const TokenSeq& tokens);

// FStr yields its constant; SubLr extracts substr(sigma(i), pL, pR) and
// wraps it. Undefined when the variable is unbound, a sub-evaluation is
// undefined, or the final string is empty (output tokens must be non-empty).
std::optional<std::string> eval_fix_expr(const FixExpr& f,
                                         const Substitution& sub);

// Full rule application; nullopt means "this rule does not apply".
std::optional<TokenSeq> eval_rule(const ConcreteRule& r, const TokenSeq& cmd,
                                  const TokenSeq& err);

}  // namespace cmdfix
