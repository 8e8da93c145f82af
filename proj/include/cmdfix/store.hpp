#pragma once

// Persistence of learned rules and the suggestion engine matching a new
// (command, error) pair against every stored rule.
//
// File format: JSON, schema-versioned. Top level {"version": 1, "rules":
// [...]}. Match components serialize as {"t":"str","s":...} or
// {"t":"var","i":...,"l":...,"r":...,"bindings":[...]}, fix components as
// {"t":"fstr","s":...} or {"t":"cands","bindings":[...],"entries":[...]},
// position expressions as {"t":"ipos","k":...} or
// {"t":"cpos","c":...,"k":...,"d":...}. Keys, entries and pairs are sorted,
// so serialization is canonical.

#include <nlohmann/json_fwd.hpp>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cmdfix/partition.hpp"
#include "cmdfix/synthesis.hpp"

namespace cmdfix {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Content hash of the canonical serialization; stable across runs and
// across example input orders.
std::string rule_id(const SymbolicRule& rule);

// Fingerprint of one example (used for provenance records).
std::string example_fingerprint(const Example& e);

nlohmann::json rule_to_json(const SymbolicRule& rule);
SymbolicRule rule_from_json(const nlohmann::json& j);

struct StoredRule {
  std::string id;
  SymbolicRule rule;
  std::vector<std::string> provenance;
  std::string created_at;
};

struct Suggestion {
  std::string rule_id;
  TokenSeq fixed;
  int specificity = 0;
};

class RuleStore {
 public:
  std::size_t size() const { return rules_.size(); }
  const std::vector<StoredRule>& rules() const { return rules_; }
  const StoredRule* find(std::string_view id) const;

  // Content-hash dedupe; returns the number of rules actually added.
  int add_rule(const SymbolicRule& rule, std::vector<std::string> provenance);
  int add_rules(const LearnResult& result);

  // One suggestion per matching rule, ordered by specificity descending then
  // rule id; no dedupe.
  std::vector<Suggestion> matches(const TokenSeq& cmd,
                                  const TokenSeq& err) const;
  // Same but with identical fixed commands deduplicated (best kept).
  std::vector<Suggestion> suggest(const TokenSeq& cmd,
                                  const TokenSeq& err) const;

  // Atomic write (temp file + rename). Throws StoreError on I/O failure.
  void save(const std::string& path) const;
  // Throws StoreError on I/O failure, parse errors (with position), or an
  // unknown schema version. A failed load leaves no partial store behind.
  static RuleStore load(const std::string& path);

  nlohmann::json to_json() const;
  static RuleStore from_json(const nlohmann::json& j);

 private:
  std::vector<StoredRule> rules_;
};

}  // namespace cmdfix
