#pragma once

// Command-line front end. Exit codes are stable: 0 success, 1 I/O failure,
// 2 malformed input, 3 no suggestion, 4 unknown rule id.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cmdfix/store.hpp"
#include "cmdfix/synthesis.hpp"

namespace cmdfix::cli {

inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kBadInput = 2;
inline constexpr int kNoSuggestion = 3;
inline constexpr int kUnknownId = 4;

struct LearnOptions {
  std::string examples_path;
  std::string store_path;
  int max_offset = 1;
  int max_group = 10;
};

struct SuggestOptions {
  std::string cmd;
  std::string err;
  std::string store_path;
  int top = 5;
};

struct ShowOptions {
  std::string store_path;
  std::string concretize_id;  // empty: list every rule
  std::size_t cap = 25;       // concrete rules streamed at most
};

struct TestOptions {
  std::string examples_path;
  std::string store_path;
};

struct BenchOptions {
  std::vector<int> sizes;
  bool non_lazy = false;
  int max_offset = 1;
};

int cmd_learn(const LearnOptions& opts, std::ostream& out, std::ostream& err);
int cmd_suggest(const SuggestOptions& opts, std::ostream& out,
                std::ostream& err);
int cmd_show(const ShowOptions& opts, std::ostream& out, std::ostream& err);
int cmd_test(const TestOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

// Full argv dispatch (excluding the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

// Reads JSON-lines example records {"cmd":..., "err":..., "fix":...}.
// Throws StoreError with a line number on malformed records.
std::vector<Example> read_examples_jsonl(std::istream& in);

// Human-readable rule rendering with display variables renumbered 1..n.
void print_rule(std::ostream& out, const StoredRule& stored,
                std::size_t candidate_cap = 8);

// The benchmark's artificial example pair: the token lists of a two-token
// repair example repeated `scale` times.
std::pair<Example, Example> scaled_example_pair(int scale);

// Seconds per synthesis run at the given scale (repetition-averaged so
// small sizes are not pure timer noise).
double time_synthesis(int scale, bool non_lazy, const SynthConfig& cfg);

}  // namespace cmdfix::cli
