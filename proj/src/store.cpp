#include "cmdfix/store.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace cmdfix {

using nlohmann::json;

namespace {

std::string fnv1a64_hex(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

std::string now_iso8601() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

json pos_to_json(const PosExpr& p) {
  if (p.kind == PosExpr::Kind::Ipos) {
    return json{{"t", "ipos"}, {"k", p.k}};
  }
  return json{{"t", "cpos"}, {"c", std::string(1, p.c)}, {"k", p.k},
              {"d", p.delta}};
}

PosExpr pos_from_json(const json& j) {
  if (!j.is_object() || !j.contains("t")) {
    throw StoreError("position expression: expected tagged object");
  }
  std::string tag = j.at("t").get<std::string>();
  if (tag == "ipos") {
    return PosExpr::ipos(j.at("k").get<int>());
  }
  if (tag == "cpos") {
    std::string c = j.at("c").get<std::string>();
    int k = j.at("k").get<int>();
    if (c.size() != 1) {
      throw StoreError("position expression: 'c' must be one character");
    }
    if (k == 0) {
      throw StoreError("position expression: occurrence count must not be 0");
    }
    return PosExpr::cpos(c[0], k, j.at("d").get<int>());
  }
  throw StoreError("position expression: unknown tag '" + tag + "'");
}

json match_to_json(const SymbolicMatchComponent& component) {
  if (const auto* fixed = std::get_if<FixedTok>(&component)) {
    return json{{"t", "str"}, {"s", fixed->text}};
  }
  const auto& var = std::get<VarComponent>(component);
  return json{{"t", "var"},
              {"i", var.index},
              {"l", var.prefix},
              {"r", var.suffix},
              {"bindings", var.bindings}};
}

SymbolicMatchComponent match_from_json(const json& j) {
  std::string tag = j.at("t").get<std::string>();
  if (tag == "str") {
    return FixedTok{j.at("s").get<std::string>()};
  }
  if (tag == "var") {
    VarComponent var;
    var.index = j.at("i").get<int>();
    if (var.index < 0) throw StoreError("match component: negative index");
    var.prefix = j.at("l").get<std::string>();
    var.suffix = j.at("r").get<std::string>();
    var.bindings = j.at("bindings").get<std::vector<std::string>>();
    return var;
  }
  throw StoreError("match component: unknown tag '" + tag + "'");
}

json fix_to_json(const SymbolicFixComponent& component) {
  if (const auto* fixed = std::get_if<FixedStr>(&component)) {
    return json{{"t", "fstr"}, {"s", fixed->text}};
  }
  const auto& cs = std::get<CandidateSet>(component);
  json entries = json::array();
  for (const auto& [key, pairs] : cs.entries) {  // map order: sorted keys
    json pair_list = json::array();
    for (const PosPair& pair : pairs) {  // vectors kept sorted
      pair_list.push_back(json::array(
          {pos_to_json(pair.first), pos_to_json(pair.second)}));
    }
    entries.push_back(json{{"var", key.var_index},
                           {"l", key.prefix},
                           {"r", key.suffix},
                           {"pairs", pair_list}});
  }
  return json{{"t", "cands"}, {"bindings", cs.bindings}, {"entries", entries}};
}

SymbolicFixComponent fix_from_json(const json& j) {
  std::string tag = j.at("t").get<std::string>();
  if (tag == "fstr") {
    return FixedStr{j.at("s").get<std::string>()};
  }
  if (tag == "cands") {
    CandidateSet cs;
    cs.bindings = j.at("bindings").get<std::vector<std::string>>();
    for (const json& entry : j.at("entries")) {
      SubLrKey key{entry.at("var").get<int>(),
                   entry.at("l").get<std::string>(),
                   entry.at("r").get<std::string>()};
      if (key.var_index < 0) throw StoreError("candidate entry: negative var");
      auto& pairs = cs.entries[key];
      for (const json& pair : entry.at("pairs")) {
        if (!pair.is_array() || pair.size() != 2) {
          throw StoreError("candidate entry: pair must have two positions");
        }
        pairs.emplace_back(pos_from_json(pair[0]), pos_from_json(pair[1]));
      }
      std::sort(pairs.begin(), pairs.end());
      pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
      if (pairs.empty()) {
        throw StoreError("candidate entry: empty pair list");
      }
    }
    return cs;
  }
  throw StoreError("fix component: unknown tag '" + tag + "'");
}

}  // namespace

std::string rule_id(const SymbolicRule& rule) {
  return fnv1a64_hex(rule_to_json(canonical_form(rule)).dump());
}

std::string example_fingerprint(const Example& e) {
  return fnv1a64_hex(join(e.cmd) + '\n' + join(e.err) + '\n' + join(e.fix));
}

json rule_to_json(const SymbolicRule& rule) {
  json cmd = json::array();
  for (const auto& component : rule.cmd_match) {
    cmd.push_back(match_to_json(component));
  }
  json err = json::array();
  for (const auto& component : rule.err_match) {
    err.push_back(match_to_json(component));
  }
  json fix = json::array();
  for (const auto& component : rule.fix) {
    fix.push_back(fix_to_json(component));
  }
  return json{{"cmd", cmd},
              {"err", err},
              {"fix", fix},
              {"examples", rule.example_count}};
}

SymbolicRule rule_from_json(const json& j) {
  SymbolicRule rule;
  rule.example_count = j.at("examples").get<int>();
  if (rule.example_count < 0) throw StoreError("rule: negative example count");
  for (const json& component : j.at("cmd")) {
    rule.cmd_match.push_back(match_from_json(component));
  }
  for (const json& component : j.at("err")) {
    rule.err_match.push_back(match_from_json(component));
  }
  for (const json& component : j.at("fix")) {
    rule.fix.push_back(fix_from_json(component));
  }
  // Binding lists must all agree with the example count.
  auto check_bindings = [&](std::size_t got) {
    if (got != static_cast<std::size_t>(rule.example_count)) {
      throw StoreError("rule: binding list length does not match examples");
    }
  };
  for (const auto* list : {&rule.cmd_match, &rule.err_match}) {
    for (const auto& component : *list) {
      if (const auto* var = std::get_if<VarComponent>(&component)) {
        check_bindings(var->bindings.size());
      }
    }
  }
  for (const auto& component : rule.fix) {
    if (const auto* cs = std::get_if<CandidateSet>(&component)) {
      check_bindings(cs->bindings.size());
    }
  }
  return rule;
}

const StoredRule* RuleStore::find(std::string_view id) const {
  for (const StoredRule& stored : rules_) {
    if (stored.id == id) return &stored;
  }
  return nullptr;
}

int RuleStore::add_rule(const SymbolicRule& rule,
                        std::vector<std::string> provenance) {
  std::string id = rule_id(rule);
  if (find(id)) return 0;
  rules_.push_back(
      StoredRule{std::move(id), rule, std::move(provenance), now_iso8601()});
  return 1;
}

int RuleStore::add_rules(const LearnResult& result) {
  int added = 0;
  for (std::size_t rule_index = 0; rule_index < result.rules.size();
       ++rule_index) {
    std::vector<std::string> provenance;
    for (std::size_t i = 0; i < result.examples.size(); ++i) {
      if (result.assignment[i] == static_cast<int>(rule_index)) {
        provenance.push_back(example_fingerprint(result.examples[i]));
      }
    }
    std::sort(provenance.begin(), provenance.end());
    added += add_rule(result.rules[rule_index], std::move(provenance));
  }
  return added;
}

std::vector<Suggestion> RuleStore::matches(const TokenSeq& cmd,
                                           const TokenSeq& err) const {
  std::vector<Suggestion> out;
  for (const StoredRule& stored : rules_) {
    if (auto fixed = apply_symbolic(stored.rule, cmd, err)) {
      out.push_back(
          Suggestion{stored.id, std::move(*fixed), specificity(stored.rule)});
    }
  }
  std::sort(out.begin(), out.end(), [](const Suggestion& a,
                                       const Suggestion& b) {
    if (a.specificity != b.specificity) return a.specificity > b.specificity;
    return a.rule_id < b.rule_id;
  });
  return out;
}

std::vector<Suggestion> RuleStore::suggest(const TokenSeq& cmd,
                                           const TokenSeq& err) const {
  std::vector<Suggestion> ranked = matches(cmd, err);
  std::vector<Suggestion> out;
  std::set<std::string> seen;
  for (Suggestion& s : ranked) {
    if (seen.insert(join(s.fixed)).second) out.push_back(std::move(s));
  }
  return out;
}

json RuleStore::to_json() const {
  json rules = json::array();
  for (const StoredRule& stored : rules_) {
    rules.push_back(json{{"id", stored.id},
                         {"createdAt", stored.created_at},
                         {"provenance", stored.provenance},
                         {"rule", rule_to_json(stored.rule)}});
  }
  return json{{"version", 1}, {"rules", rules}};
}

RuleStore RuleStore::from_json(const json& j) {
  if (!j.is_object() || !j.contains("version")) {
    throw StoreError("store: missing schema version");
  }
  int version = j.at("version").get<int>();
  if (version != 1) {
    throw StoreError("store: unsupported schema version " +
                     std::to_string(version));
  }
  RuleStore store;
  for (const json& entry : j.at("rules")) {
    StoredRule stored;
    stored.id = entry.at("id").get<std::string>();
    stored.created_at = entry.value("createdAt", std::string{});
    stored.provenance =
        entry.value("provenance", std::vector<std::string>{});
    stored.rule = rule_from_json(entry.at("rule"));
    store.rules_.push_back(std::move(stored));
  }
  return store;
}

void RuleStore::save(const std::string& path) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot open '" + tmp + "' for writing");
    out << to_json().dump(2) << '\n';
    if (!out) throw StoreError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw StoreError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

RuleStore RuleStore::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw StoreError("parse error in '" + path + "': " + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw StoreError("malformed store '" + path + "': " + e.what());
  }
}

}  // namespace cmdfix
