#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lpir {

/// Parameters of one leaky-PIR instance: N replicated non-colluding servers,
/// K stored messages, and a leakage ratio exponent epsilon in nats.
///
/// Message symbols live in [0:N-1] per message (index 0 is the implicit zero
/// dummy), random keys are length-(K-1) vectors over [0:N-1], and queries are
/// length-K vectors over [0:N-1].
struct SchemeParams {
  int n_servers;    ///< N, at least 2
  int n_messages;   ///< K, at least 2
  double epsilon;   ///< leakage exponent in nats, finite and >= 0

  SchemeParams(int n, int k, double eps);

  /// Validates an (N, K) pair alone, for operations that are parameterized by
  /// a download cost instead of a leakage exponent.
  static void check_counts(int n, int k);
};

/// Length-(K-1) random key vector over [0:N-1] with its Hamming weight cached.
struct KeyVector {
  std::vector<int> entries;
  int weight = 0;
};

/// Server relabeling pi: [1:N] -> [0:N-1]. mapping[i] holds pi(i+1).
/// The permutation is cyclic when pi(n+1) = pi(n) + 1 (mod N) for all n.
struct Permutation {
  std::vector<int> mapping;
  bool is_cyclic = false;
};

/// Length-K query vector over [0:N-1] with its Hamming weight cached.
struct QueryVector {
  std::vector<int> entries;
  int weight = 0;
};

/// Builds a key vector, validating every entry against [0:N-1].
KeyVector make_key_vector(std::vector<int> entries, int n_servers);

/// Builds a query vector, validating every entry against [0:N-1].
QueryVector make_query_vector(std::vector<int> entries, int n_servers);

/// Builds a permutation, validating that mapping is a bijection onto [0:N-1].
Permutation make_permutation(std::vector<int> mapping);

/// Number of key vectors of the given Hamming weight:
///   s_j = C(K-1, j) * (N-1)^j.
/// Throws std::out_of_range for weight outside [0:K-1] and
/// std::overflow_error if the count does not fit a signed 64-bit integer.
std::int64_t key_class_size(const SchemeParams& params, int weight);

/// Number of query vectors of the given Hamming weight:
///   t_j = C(K, j) * (N-1)^j.
/// Same error contract as key_class_size, with weight in [0:K].
std::int64_t query_class_size(const SchemeParams& params, int weight);

/// Enumerates key vectors in lexicographic order (first entry most
/// significant), optionally restricted to one Hamming weight class.
std::vector<KeyVector> enumerate_keys(const SchemeParams& params,
                                      std::optional<int> weight = std::nullopt);

inline constexpr int kDefaultPermutationGuard = 5040;

/// Enumerates permutations of [0:N-1] in canonical order: the N cyclic shifts
/// ordered by pi(1) when cyclic_only, otherwise all N! permutations in
/// lexicographic order. Refuses a full enumeration when N! exceeds the guard.
std::vector<Permutation> enumerate_permutations(const SchemeParams& params,
                                                bool cyclic_only,
                                                std::int64_t guard = kDefaultPermutationGuard);

/// Canonical table index of a digit vector: base-N value with the first digit
/// most significant, so lexicographic order equals numeric order.
std::uint64_t encode_base_n(std::span<const int> digits, int base);

/// Inverse of encode_base_n for a vector of known length.
std::vector<int> decode_base_n(std::uint64_t code, int length, int base);

/// Renders a digit vector for reports: concatenated digits when every entry
/// is a single decimal digit, comma-separated otherwise.
std::string format_digits(std::span<const int> digits);

/// Overflow-checked integer helpers used by the class-size formulas.
std::int64_t checked_pow(std::int64_t base, int exp);
std::int64_t checked_binomial(int n, int k);
std::int64_t checked_factorial(int n);

}  // namespace lpir
