#include "cmdfix/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cmdfix/oracle.hpp"
#include "cmdfix/partition.hpp"

namespace cmdfix::cli {

using nlohmann::json;

std::vector<Example> read_examples_jsonl(std::istream& in) {
  std::vector<Example> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (blank) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw StoreError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("cmd") || !j.contains("err") ||
        !j.contains("fix")) {
      throw StoreError("line " + std::to_string(line_no) +
                       ": record needs string fields cmd, err, fix");
    }
    Example e;
    try {
      e = make_example(j.at("cmd").get<std::string>(),
                       j.at("err").get<std::string>(),
                       j.at("fix").get<std::string>());
    } catch (const json::exception& e) {
      throw StoreError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (e.cmd.empty()) {
      throw StoreError("line " + std::to_string(line_no) +
                       ": cmd must contain at least one token");
    }
    if (e.fix.empty()) {
      throw StoreError("line " + std::to_string(line_no) +
                       ": fix must contain at least one token");
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace {

std::string pos_to_string(const PosExpr& p) {
  char buf[48];
  if (p.kind == PosExpr::Kind::Ipos) {
    std::snprintf(buf, sizeof buf, "Ipos(%d)", p.k);
  } else {
    std::snprintf(buf, sizeof buf, "Cpos('%c', %d, %d)", p.c, p.k, p.delta);
  }
  return buf;
}

std::string quoted(const std::string& s) { return '"' + s + '"'; }

// Sequential display numbering for variables, in order of appearance.
std::map<int, int> display_ids(const SymbolicRule& rule) {
  std::map<int, int> ids;
  int next = 1;
  for (const auto* list : {&rule.cmd_match, &rule.err_match}) {
    for (const auto& component : *list) {
      if (const auto* var = std::get_if<VarComponent>(&component)) {
        ids.emplace(var->index, next++);
      }
    }
  }
  return ids;
}

std::string sublr_to_string(const SubLr& expr, const std::map<int, int>& ids) {
  auto it = ids.find(expr.var_index);
  int shown = it == ids.end() ? expr.var_index : it->second;
  std::ostringstream os;
  os << "Sub-lr(" << pos_to_string(expr.left_pos) << ", "
     << pos_to_string(expr.right_pos) << ", " << quoted(expr.prefix) << ", "
     << quoted(expr.suffix) << ", Var(" << shown << "))";
  return os.str();
}

void print_match_list(std::ostream& out, const char* label,
                      const std::vector<SymbolicMatchComponent>& components,
                      const std::map<int, int>& ids) {
  out << label << "[";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i > 0) out << ", ";
    if (const auto* fixed = std::get_if<FixedTok>(&components[i])) {
      out << fixed->text;
    } else {
      const auto& var = std::get<VarComponent>(components[i]);
      out << "Var(" << ids.at(var.index) << ", " << quoted(var.prefix) << ", "
          << quoted(var.suffix) << ")";
    }
  }
  out << "]\n";
}

void print_fix_expr(std::ostream& out, const FixExpr& expr,
                    const std::map<int, int>& ids) {
  if (const auto* fs = std::get_if<FStr>(&expr)) {
    out << "Fstr(" << fs->text << ")";
  } else {
    out << sublr_to_string(std::get<SubLr>(expr), ids);
  }
}

int load_store_or_fail(const std::string& path, RuleStore& store,
                       std::ostream& err) {
  try {
    store = RuleStore::load(path);
  } catch (const StoreError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kOk;
}

}  // namespace

void print_rule(std::ostream& out, const StoredRule& stored,
                std::size_t candidate_cap) {
  const SymbolicRule& rule = stored.rule;
  std::map<int, int> ids = display_ids(rule);
  out << "rule " << stored.id << "  (shape " << rule.cmd_match.size() << "/"
      << rule.err_match.size() << "/" << rule.fix.size() << ", examples "
      << rule.example_count << ", concrete " << count_concrete(rule).str()
      << ")\n";
  print_match_list(out, "  match ", rule.cmd_match, ids);
  print_match_list(out, "  and   ", rule.err_match, ids);
  out << "  ->    [";
  for (std::size_t i = 0; i < rule.fix.size(); ++i) {
    if (i > 0) out << ", ";
    if (const auto* fixed = std::get_if<FixedStr>(&rule.fix[i])) {
      out << "Fstr(" << fixed->text << ")";
    } else {
      const auto& cs = std::get<CandidateSet>(rule.fix[i]);
      auto exprs = flatten_candidates(cs);
      out << "{";
      for (std::size_t k = 0; k < exprs.size() && k < candidate_cap; ++k) {
        if (k > 0) out << ", ";
        out << sublr_to_string(exprs[k], ids);
      }
      if (exprs.size() > candidate_cap) {
        out << ", ... " << exprs.size() - candidate_cap << " more";
      }
      out << "}";
    }
  }
  out << "]\n";
}

int cmd_learn(const LearnOptions& opts, std::ostream& out, std::ostream& err) {
  std::ifstream in(opts.examples_path);
  if (!in) {
    err << "error: cannot open '" << opts.examples_path << "'\n";
    return kIoError;
  }
  std::vector<Example> examples;
  try {
    examples = read_examples_jsonl(in);
  } catch (const StoreError& e) {
    err << "error: " << opts.examples_path << ": " << e.what() << "\n";
    return kBadInput;
  }

  SynthConfig cfg{opts.max_offset};
  LearnResult result = learn_rules(examples, cfg, opts.max_group);

  RuleStore store;
  std::ifstream probe(opts.store_path);
  if (probe.good()) {
    probe.close();
    int rc = load_store_or_fail(opts.store_path, store, err);
    if (rc != kOk) return rc;
  }
  store.add_rules(result);
  try {
    store.save(opts.store_path);
  } catch (const StoreError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }

  for (const SymbolicRule& rule : result.rules) {
    out << "rule " << rule_id(rule) << "  shape " << rule.cmd_match.size()
        << "/" << rule.err_match.size() << "/" << rule.fix.size()
        << "  examples " << rule.example_count << "  concrete "
        << count_concrete(rule).str() << "\n";
  }
  if (result.used_greedy) {
    out << "note: some groups exceeded --max-group; greedy blocks used\n";
  }
  out << result.rules.size() << " rules learned\n";
  return kOk;
}

int cmd_suggest(const SuggestOptions& opts, std::ostream& out,
                std::ostream& err) {
  RuleStore store;
  int rc = load_store_or_fail(opts.store_path, store, err);
  if (rc != kOk) return rc;
  TokenSeq cmd = tokenize(opts.cmd);
  TokenSeq errs = tokenize(opts.err);
  auto suggestions = store.suggest(cmd, errs);
  int shown = 0;
  for (const Suggestion& s : suggestions) {
    if (shown >= opts.top) break;
    out << join(s.fixed) << "\n";
    ++shown;
  }
  return shown > 0 ? kOk : kNoSuggestion;
}

int cmd_show(const ShowOptions& opts, std::ostream& out, std::ostream& err) {
  RuleStore store;
  int rc = load_store_or_fail(opts.store_path, store, err);
  if (rc != kOk) return rc;
  if (opts.concretize_id.empty()) {
    for (const StoredRule& stored : store.rules()) {
      print_rule(out, stored);
    }
    out << store.size() << " rules\n";
    return kOk;
  }
  const StoredRule* stored = store.find(opts.concretize_id);
  if (!stored) {
    err << "error: no rule with id '" << opts.concretize_id << "'\n";
    return kUnknownId;
  }
  print_rule(out, *stored);
  std::map<int, int> ids = display_ids(stored->rule);
  RuleCount total = count_concrete(stored->rule);
  Concretizer stream(stored->rule);
  std::size_t shown = 0;
  while (shown < opts.cap) {
    auto rule = stream.next();
    if (!rule) break;
    out << "  #" << shown + 1 << " [";
    for (std::size_t i = 0; i < rule->fix.size(); ++i) {
      if (i > 0) out << ", ";
      print_fix_expr(out, rule->fix[i], ids);
    }
    out << "]\n";
    ++shown;
  }
  out << shown << " of " << total.str() << " concrete rules\n";
  return kOk;
}

int cmd_test(const TestOptions& opts, std::ostream& out, std::ostream& err) {
  std::ifstream in(opts.examples_path);
  if (!in) {
    err << "error: cannot open '" << opts.examples_path << "'\n";
    return kIoError;
  }
  std::vector<Example> examples;
  try {
    examples = read_examples_jsonl(in);
  } catch (const StoreError& e) {
    err << "error: " << opts.examples_path << ": " << e.what() << "\n";
    return kBadInput;
  }
  RuleStore store;
  int rc = load_store_or_fail(opts.store_path, store, err);
  if (rc != kOk) return rc;

  int matched_one = 0;
  int matched_many = 0;
  int unmatched = 0;
  int correct = 0;
  for (const Example& e : examples) {
    auto per_rule = store.matches(e.cmd, e.err);
    if (per_rule.empty()) {
      ++unmatched;
    } else if (per_rule.size() == 1) {
      ++matched_one;
    } else {
      ++matched_many;
    }
    for (const Suggestion& s : per_rule) {
      if (s.fixed == e.fix) {
        ++correct;
        break;
      }
    }
  }
  out << "matched by one rule: " << matched_one << "\n";
  out << "matched by multiple rules: " << matched_many << "\n";
  out << "unmatched: " << unmatched << "\n";
  out << "accuracy: " << correct << "/" << examples.size() << "\n";
  return correct == static_cast<int>(examples.size()) ? kOk : kNoSuggestion;
}

std::pair<Example, Example> scaled_example_pair(int scale) {
  Example base_a = make_example(
      "java Run.java", "Could not find or load main class Run.java",
      "java Run");
  Example base_b = make_example(
      "java Meta.java", "Could not find or load main class Meta.java",
      "java Meta");
  auto repeat = [&](const Example& base) {
    Example scaled;
    for (int i = 0; i < scale; ++i) {
      scaled.cmd.insert(scaled.cmd.end(), base.cmd.begin(), base.cmd.end());
      scaled.err.insert(scaled.err.end(), base.err.begin(), base.err.end());
      scaled.fix.insert(scaled.fix.end(), base.fix.begin(), base.fix.end());
    }
    return scaled;
  };
  return {repeat(base_a), repeat(base_b)};
}

double time_synthesis(int scale, bool non_lazy, const SynthConfig& cfg) {
  auto [a, b] = scaled_example_pair(scale);
  std::vector<Example> examples{a, b};
  auto run = [&] {
    if (non_lazy) {
      auto rule = nonlazy_synth(examples, cfg);
      return rule.has_value();
    }
    auto rule = synth_rules(examples, cfg);
    return rule.has_value();
  };
  using clock = std::chrono::steady_clock;
  auto measure = [&](int reps) {
    auto start = clock::now();
    for (int i = 0; i < reps; ++i) {
      if (!run()) return -1.0;
    }
    std::chrono::duration<double> elapsed = clock::now() - start;
    return elapsed.count() / reps;
  };
  double once = measure(1);
  if (once < 0) return -1.0;
  if (once >= 0.05) return once;
  int reps = std::min(200, static_cast<int>(0.05 / std::max(once, 1e-7)) + 1);
  return measure(reps);
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream&) {
  SynthConfig cfg{opts.max_offset};
  out << "size,seconds\n";
  for (int size : opts.sizes) {
    double seconds = time_synthesis(size, opts.non_lazy, cfg);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%d,%.6f\n", size, seconds);
    out << buf;
  }
  return kOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"learns command-repair rules from examples and suggests fixes"};
  app.require_subcommand(1);

  LearnOptions learn;
  auto* learn_cmd = app.add_subcommand("learn", "learn rules from examples");
  learn_cmd->add_option("--examples", learn.examples_path,
                        "JSON-lines example file")->required();
  learn_cmd->add_option("--store", learn.store_path, "rule store file")
      ->required();
  learn_cmd->add_option("--max-offset", learn.max_offset,
                        "bound on |delta| in enumerated positions");
  learn_cmd->add_option("--max-group", learn.max_group,
                        "largest group searched exhaustively");

  SuggestOptions suggest;
  auto* suggest_cmd = app.add_subcommand("suggest", "suggest fixed commands");
  suggest_cmd->add_option("--cmd", suggest.cmd, "the buggy command")
      ->required();
  suggest_cmd->add_option("--err", suggest.err, "the error message")
      ->required();
  suggest_cmd->add_option("--store", suggest.store_path, "rule store file")
      ->required();
  suggest_cmd->add_option("--top", suggest.top, "max suggestions printed");

  ShowOptions show;
  auto* show_cmd = app.add_subcommand("show", "inspect stored rules");
  show_cmd->add_option("--store", show.store_path, "rule store file")
      ->required();
  show_cmd->add_option("--concretize", show.concretize_id,
                       "stream concrete rules of one stored rule");
  show_cmd->add_option("--cap", show.cap, "concrete rules streamed at most");

  TestOptions test;
  auto* test_cmd =
      app.add_subcommand("test", "evaluate a store on held-out examples");
  test_cmd->add_option("--examples", test.examples_path,
                       "JSON-lines example file")->required();
  test_cmd->add_option("--store", test.store_path, "rule store file")
      ->required();

  BenchOptions bench;
  auto* bench_cmd =
      app.add_subcommand("bench", "time synthesis on scaled examples");
  bench_cmd->add_option("--sizes", bench.sizes, "comma-separated scales")
      ->required()->delimiter(',');
  bench_cmd->add_flag("--non-lazy", bench.non_lazy,
                      "time the non-lazy baseline instead");
  bench_cmd->add_option("--max-offset", bench.max_offset,
                        "bound on |delta| in enumerated positions");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  if (learn_cmd->parsed()) return cmd_learn(learn, out, err);
  if (suggest_cmd->parsed()) return cmd_suggest(suggest, out, err);
  if (show_cmd->parsed()) return cmd_show(show, out, err);
  if (test_cmd->parsed()) return cmd_test(test, out, err);
  if (bench_cmd->parsed()) return cmd_bench(bench, out, err);
  return kOk;
}

}  // namespace cmdfix::cli
