#include "lpir/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lpir {

namespace {

int checked_weight(const std::vector<int>& entries, int n_servers, const char* what) {
  int weight = 0;
  for (int e : entries) {
    if (e < 0 || e >= n_servers) {
      std::ostringstream msg;
      msg << what << " entry " << e << " outside [0:" << n_servers - 1 << "]";
      throw std::invalid_argument(msg.str());
    }
    weight += e != 0;
  }
  return weight;
}

bool cyclic_mapping(const std::vector<int>& mapping) {
  const int n = static_cast<int>(mapping.size());
  for (int i = 0; i + 1 < n; ++i) {
    if (mapping[i + 1] != (mapping[i] + 1) % n) return false;
  }
  return true;
}

}  // namespace

SchemeParams::SchemeParams(int n, int k, double eps)
    : n_servers(n), n_messages(k), epsilon(eps) {
  check_counts(n, k);
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("epsilon must be finite and >= 0");
  }
}

void SchemeParams::check_counts(int n, int k) {
  if (n < 2) throw std::invalid_argument("N must be >= 2");
  if (k < 2) throw std::invalid_argument("K must be >= 2");
}

KeyVector make_key_vector(std::vector<int> entries, int n_servers) {
  KeyVector f;
  f.weight = checked_weight(entries, n_servers, "key");
  f.entries = std::move(entries);
  return f;
}

QueryVector make_query_vector(std::vector<int> entries, int n_servers) {
  QueryVector q;
  q.weight = checked_weight(entries, n_servers, "query");
  q.entries = std::move(entries);
  return q;
}

Permutation make_permutation(std::vector<int> mapping) {
  const int n = static_cast<int>(mapping.size());
  if (n < 2) throw std::invalid_argument("permutation needs at least 2 entries");
  std::vector<bool> seen(n, false);
  for (int v : mapping) {
    if (v < 0 || v >= n || seen[v]) {
      throw std::invalid_argument("permutation mapping is not a bijection onto [0:N-1]");
    }
    seen[v] = true;
  }
  Permutation pi;
  pi.is_cyclic = cyclic_mapping(mapping);
  pi.mapping = std::move(mapping);
  return pi;
}

std::int64_t checked_pow(std::int64_t base, int exp) {
  if (exp < 0) throw std::invalid_argument("negative exponent");
  std::int64_t result = 1;
  for (int i = 0; i < exp; ++i) {
    if (__builtin_mul_overflow(result, base, &result)) {
      throw std::overflow_error("power exceeds 64-bit range");
    }
  }
  return result;
}

std::int64_t checked_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) is divisible by i at every step
    std::int64_t num;
    if (__builtin_mul_overflow(result, static_cast<std::int64_t>(n - k + i), &num)) {
      throw std::overflow_error("binomial exceeds 64-bit range");
    }
    result = num / i;
  }
  return result;
}

std::int64_t checked_factorial(int n) {
  if (n < 0) throw std::invalid_argument("negative factorial");
  std::int64_t result = 1;
  for (int i = 2; i <= n; ++i) {
    if (__builtin_mul_overflow(result, static_cast<std::int64_t>(i), &result)) {
      throw std::overflow_error("factorial exceeds 64-bit range");
    }
  }
  return result;
}

std::int64_t key_class_size(const SchemeParams& params, int weight) {
  if (weight < 0 || weight > params.n_messages - 1) {
    throw std::out_of_range("key weight outside [0:K-1]");
  }
  const std::int64_t combos = checked_binomial(params.n_messages - 1, weight);
  const std::int64_t values = checked_pow(params.n_servers - 1, weight);
  std::int64_t result;
  if (__builtin_mul_overflow(combos, values, &result)) {
    throw std::overflow_error("key class size exceeds 64-bit range");
  }
  return result;
}

std::int64_t query_class_size(const SchemeParams& params, int weight) {
  if (weight < 0 || weight > params.n_messages) {
    throw std::out_of_range("query weight outside [0:K]");
  }
  const std::int64_t combos = checked_binomial(params.n_messages, weight);
  const std::int64_t values = checked_pow(params.n_servers - 1, weight);
  std::int64_t result;
  if (__builtin_mul_overflow(combos, values, &result)) {
    throw std::overflow_error("query class size exceeds 64-bit range");
  }
  return result;
}

std::vector<KeyVector> enumerate_keys(const SchemeParams& params, std::optional<int> weight) {
  if (weight.has_value() && (*weight < 0 || *weight > params.n_messages - 1)) {
    throw std::out_of_range("key weight outside [0:K-1]");
  }
  const int len = params.n_messages - 1;
  const std::int64_t total = checked_pow(params.n_servers, len);
  std::vector<KeyVector> keys;
  keys.reserve(weight.has_value() ? static_cast<std::size_t>(key_class_size(params, *weight))
                                  : static_cast<std::size_t>(total));
  for (std::int64_t code = 0; code < total; ++code) {
    KeyVector f;
    f.entries = decode_base_n(static_cast<std::uint64_t>(code), len, params.n_servers);
    f.weight = static_cast<int>(std::count_if(f.entries.begin(), f.entries.end(),
                                              [](int e) { return e != 0; }));
    if (!weight.has_value() || f.weight == *weight) keys.push_back(std::move(f));
  }
  return keys;
}

std::vector<Permutation> enumerate_permutations(const SchemeParams& params, bool cyclic_only,
                                                std::int64_t guard) {
  const int n = params.n_servers;
  std::vector<Permutation> perms;
  if (cyclic_only) {
    perms.reserve(n);
    for (int c = 0; c < n; ++c) {
      std::vector<int> mapping(n);
      for (int i = 0; i < n; ++i) mapping[i] = (c + i) % n;
      perms.push_back(Permutation{std::move(mapping), true});
    }
    return perms;
  }
  const std::int64_t count = checked_factorial(n);
  if (count > guard) {
    std::ostringstream msg;
    msg << "full permutation enumeration needs N! = " << count
        << " entries, above the guard of " << guard;
    throw std::length_error(msg.str());
  }
  std::vector<int> mapping(n);
  std::iota(mapping.begin(), mapping.end(), 0);
  perms.reserve(static_cast<std::size_t>(count));
  do {
    perms.push_back(Permutation{mapping, cyclic_mapping(mapping)});
  } while (std::next_permutation(mapping.begin(), mapping.end()));
  return perms;
}

std::uint64_t encode_base_n(std::span<const int> digits, int base) {
  if (base < 2) throw std::invalid_argument("base must be >= 2");
  std::uint64_t code = 0;
  for (int d : digits) {
    if (d < 0 || d >= base) throw std::invalid_argument("digit outside [0:base-1]");
    code = code * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(d);
  }
  return code;
}

std::vector<int> decode_base_n(std::uint64_t code, int length, int base) {
  if (base < 2) throw std::invalid_argument("base must be >= 2");
  std::vector<int> digits(length, 0);
  for (int i = length - 1; i >= 0; --i) {
    digits[i] = static_cast<int>(code % static_cast<std::uint64_t>(base));
    code /= static_cast<std::uint64_t>(base);
  }
  if (code != 0) throw std::invalid_argument("code does not fit the given length");
  return digits;
}

std::string format_digits(std::span<const int> digits) {
  const bool compact =
      std::all_of(digits.begin(), digits.end(), [](int d) { return d >= 0 && d <= 9; });
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (!compact && i > 0) out += ',';
    out += std::to_string(digits[i]);
  }
  return out;
}

}  // namespace lpir
