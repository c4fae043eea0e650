#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lpir/scheme.hpp"

namespace lpir {

/// Probability assigned to each key-weight class: probs[j] is the mass p_j of
/// ONE (f, pi) pair with Hamming weight ||f|| = j under a cyclic permutation,
/// so the classes satisfy sum_j N * s_j * p_j = 1.
struct WeightAllocation {
  std::vector<double> probs;
};

enum class PermutationScope { cyclic, all };

/// Explicit distribution over (message, key, permutation) triples.
/// Entries are keyed by the canonical base-N encodings of the key vector and
/// of the permutation's value sequence; zero-mass entries are omitted.
struct FullAllocation {
  int n_servers = 0;
  int n_messages = 0;
  PermutationScope scope = PermutationScope::cyclic;
  /// table[k-1] maps (key code, permutation code) -> probability.
  std::vector<std::map<std::pair<std::uint64_t, std::uint64_t>, double>> table;
};

/// Outcome of checking a weight allocation against the scheme constraints.
struct ValidationReport {
  bool normalization_ok = false;   ///< |sum_j N s_j p_j - 1| <= 1e-12
  bool nonneg_ok = false;          ///< every p_j >= 0
  bool dp_ok = false;              ///< worst_ratio_log <= epsilon + 1e-9
  /// max_j |log(p_j / p_{j+1})| over adjacent classes; +infinity when exactly
  /// one side of a pair is zero, pairs with both sides zero are skipped.
  double worst_ratio_log = 0.0;
  std::vector<std::string> details;

  bool all_ok() const { return normalization_ok && nonneg_ok && dp_ok; }
};

/// Cost-optimal geometric allocation: adjacent classes are spaced by a factor
/// of exactly e^epsilon, with
///   p_j = e^{(K-1-j) eps} / (N (e^eps + N - 1)^{K-1}).
/// Computed in the log domain so large K * epsilon cannot overflow.
WeightAllocation optimal_allocation(const SchemeParams& params);

/// Baseline allocation with a uniform tail: weight 0 takes
/// p_0 = e^eps / (N e^eps + N^K - N) and every weight j >= 1 shares
/// p_j = 1 / (N e^eps + N^K - N), so only the p_0 : p_1 ratio is stretched.
WeightAllocation samy_allocation(const SchemeParams& params);

/// Checks normalization, nonnegativity, and the adjacent-ratio bound.
/// Throws std::invalid_argument if probs is not length K.
ValidationReport validate(const SchemeParams& params, const WeightAllocation& alloc);

/// Expands a weight allocation to the explicit distribution over
/// (message, key, cyclic permutation) triples. Every message index carries an
/// identical copy: N * N^{K-1} entries per message.
/// Guard: K * N^{K-1} * N stored entries must not exceed 10^7.
FullAllocation expand_to_full(const SchemeParams& params, const WeightAllocation& alloc);

/// Uniform distribution over (key, permutation) pairs for the given scope,
/// replicated per message. Same entry guard as expand_to_full.
FullAllocation uniform_full_allocation(const SchemeParams& params, PermutationScope scope);

/// Weight-allocation file format:
///   {"n": N, "k": K, "epsilon": eps, "probs": [p_0, ..., p_{K-1}]}
nlohmann::json allocation_to_json(const SchemeParams& params, const WeightAllocation& alloc);

/// Parses the format above, validating parameters and the probs length.
/// Throws std::invalid_argument on malformed input.
std::pair<SchemeParams, WeightAllocation> allocation_from_json(const nlohmann::json& doc);

/// Encoding of a permutation's value sequence used as a FullAllocation key.
std::uint64_t encode_permutation(const Permutation& pi, int n_servers);

}  // namespace lpir
