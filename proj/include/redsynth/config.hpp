#pragma once

#include <filesystem>
#include <string_view>

#include "redsynth/problem.hpp"

namespace redsynth {

// Parses the sectioned problem configuration:
//
//   [operation]   name = inc
//   [domains]     components = odd even / outputs = ... / aux = flatnum
//   [universe]    int_bound, int_out_bound, alphabet, max_len, max_out_len, ssk_k, keywords
//   [budget]      grid_bound, max_size, depth, string_singleton_len, string_pair_len,
//                 index_bound, deadline_seconds
//   [engine]      policy, seed, fair_window, inner_cap, outer_cap, drop_cap,
//                 check_invariants, strict_witness, precision, workers
//   [grammar.X]   BNF lines for output component X
//   [golden]      X = expression
//   [bootstrap]   positive = <input> -> value / negative.X = <input> -> value
//   [domain.N]    ref, kind, elements, cover (repeatable), rule (repeatable)
//
// '#' starts a comment outside quotes. Unknown sections or keys, duplicate
// keys and malformed values raise ConfigError naming the line.
ProblemSpec parse_config(std::string_view text);
ProblemSpec load_config(const std::filesystem::path& path);

}  // namespace redsynth
