#include "lpir/allocation.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lpir {

namespace {

// s_j as doubles via the recurrence s_{j+1} = s_j (K-1-j)(N-1)/(j+1), immune
// to 64-bit overflow for the formula-only paths.
std::vector<double> key_class_sizes_real(const SchemeParams& params) {
  const int kmax = params.n_messages - 1;
  std::vector<double> s(kmax + 1);
  s[0] = 1.0;
  for (int j = 0; j < kmax; ++j) {
    s[j + 1] = s[j] * (kmax - j) * (params.n_servers - 1) / (j + 1.0);
  }
  return s;
}

std::int64_t expansion_entries(const SchemeParams& params, PermutationScope scope) {
  const std::int64_t keys = checked_pow(params.n_servers, params.n_messages - 1);
  const std::int64_t perms = scope == PermutationScope::cyclic
                                 ? params.n_servers
                                 : checked_factorial(params.n_servers);
  std::int64_t per_message, total;
  if (__builtin_mul_overflow(keys, perms, &per_message) ||
      __builtin_mul_overflow(per_message, static_cast<std::int64_t>(params.n_messages),
                             &total)) {
    throw std::overflow_error("allocation expansion size exceeds 64-bit range");
  }
  return total;
}

constexpr std::int64_t kExpandEntryGuard = 10'000'000;

void check_expand_guard(const SchemeParams& params, PermutationScope scope) {
  const std::int64_t entries = expansion_entries(params, scope);
  if (entries > kExpandEntryGuard) {
    std::ostringstream msg;
    msg << "allocation expansion needs " << entries << " entries, above the guard of "
        << kExpandEntryGuard;
    throw std::length_error(msg.str());
  }
}

void check_probs_size(const SchemeParams& params, const WeightAllocation& alloc) {
  if (static_cast<int>(alloc.probs.size()) != params.n_messages) {
    throw std::invalid_argument("allocation must carry exactly K class probabilities");
  }
}

}  // namespace

WeightAllocation optimal_allocation(const SchemeParams& params) {
  const int k = params.n_messages;
  const double eps = params.epsilon;
  // log(e^eps + N - 1) = eps + log1p((N-1) e^-eps), stable for any eps >= 0
  const double log_layer = eps + std::log1p((params.n_servers - 1) * std::exp(-eps));
  const double log_base = -std::log(static_cast<double>(params.n_servers)) - (k - 1) * log_layer;
  WeightAllocation alloc;
  alloc.probs.resize(k);
  for (int j = 0; j < k; ++j) {
    alloc.probs[j] = std::exp(log_base + (k - 1 - j) * eps);
  }
  return alloc;
}

WeightAllocation samy_allocation(const SchemeParams& params) {
  const int k = params.n_messages;
  const double n = params.n_servers;
  // Shared denominator keeps p_0 / p_1 = e^eps exact and avoids overflow for
  // large eps: p_0 = 1 / (N + (N^K - N) e^-eps), p_tail = e^-eps * p_0-denom.
  const double decay = std::exp(-params.epsilon);
  const double denom = n + (std::pow(n, k) - n) * decay;
  WeightAllocation alloc;
  alloc.probs.resize(k);
  alloc.probs[0] = 1.0 / denom;
  for (int j = 1; j < k; ++j) alloc.probs[j] = decay / denom;
  return alloc;
}

ValidationReport validate(const SchemeParams& params, const WeightAllocation& alloc) {
  check_probs_size(params, alloc);
  const int k = params.n_messages;
  const std::vector<double> s = key_class_sizes_real(params);

  ValidationReport report;
  report.nonneg_ok = true;
  double total = 0.0;
  for (int j = 0; j < k; ++j) {
    total += params.n_servers * s[j] * alloc.probs[j];
    if (alloc.probs[j] < 0.0) {
      report.nonneg_ok = false;
      std::ostringstream msg;
      msg << "p[" << j << "] = " << alloc.probs[j] << " is negative";
      report.details.push_back(msg.str());
    }
  }
  report.normalization_ok = std::abs(total - 1.0) <= 1e-12;
  if (!report.normalization_ok) {
    std::ostringstream msg;
    msg << "sum_j N s_j p_j = " << total << ", expected 1";
    report.details.push_back(msg.str());
  }

  double worst = 0.0;
  for (int j = 0; j + 1 < k; ++j) {
    const double a = alloc.probs[j];
    const double b = alloc.probs[j + 1];
    if (a == 0.0 && b == 0.0) continue;  // pair carries no mass, vacuous
    if (a <= 0.0 || b <= 0.0) {
      worst = std::numeric_limits<double>::infinity();
      std::ostringstream msg;
      msg << "classes " << j << " and " << j + 1 << " have support mismatch";
      report.details.push_back(msg.str());
      continue;
    }
    worst = std::max(worst, std::abs(std::log(a / b)));
  }
  report.worst_ratio_log = worst;
  report.dp_ok = worst <= params.epsilon + 1e-9;
  if (!report.dp_ok) {
    std::ostringstream msg;
    msg << "worst adjacent log-ratio " << worst << " exceeds epsilon " << params.epsilon;
    report.details.push_back(msg.str());
  }
  return report;
}

FullAllocation expand_to_full(const SchemeParams& params, const WeightAllocation& alloc) {
  check_probs_size(params, alloc);
  check_expand_guard(params, PermutationScope::cyclic);

  FullAllocation full;
  full.n_servers = params.n_servers;
  full.n_messages = params.n_messages;
  full.scope = PermutationScope::cyclic;
  full.table.resize(params.n_messages);

  const std::vector<KeyVector> keys = enumerate_keys(params);
  const std::vector<Permutation> perms = enumerate_permutations(params, true);
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> per_message;
  for (const KeyVector& f : keys) {
    const std::uint64_t f_code = encode_base_n(f.entries, params.n_servers);
    const double mass = alloc.probs[f.weight];
    if (mass == 0.0) continue;
    for (const Permutation& pi : perms) {
      per_message[{f_code, encode_permutation(pi, params.n_servers)}] = mass;
    }
  }
  for (auto& slot : full.table) slot = per_message;
  return full;
}

FullAllocation uniform_full_allocation(const SchemeParams& params, PermutationScope scope) {
  check_expand_guard(params, scope);

  FullAllocation full;
  full.n_servers = params.n_servers;
  full.n_messages = params.n_messages;
  full.scope = scope;
  full.table.resize(params.n_messages);

  const std::vector<KeyVector> keys = enumerate_keys(params);
  const std::vector<Permutation> perms =
      enumerate_permutations(params, scope == PermutationScope::cyclic,
                             checked_factorial(params.n_servers));
  const double mass = 1.0 / (static_cast<double>(keys.size()) * static_cast<double>(perms.size()));
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> per_message;
  for (const KeyVector& f : keys) {
    const std::uint64_t f_code = encode_base_n(f.entries, params.n_servers);
    for (const Permutation& pi : perms) {
      per_message[{f_code, encode_permutation(pi, params.n_servers)}] = mass;
    }
  }
  for (auto& slot : full.table) slot = per_message;
  return full;
}

nlohmann::json allocation_to_json(const SchemeParams& params, const WeightAllocation& alloc) {
  check_probs_size(params, alloc);
  return nlohmann::json{{"n", params.n_servers},
                        {"k", params.n_messages},
                        {"epsilon", params.epsilon},
                        {"probs", alloc.probs}};
}

std::pair<SchemeParams, WeightAllocation> allocation_from_json(const nlohmann::json& doc) {
  try {
    const SchemeParams params(doc.at("n").get<int>(), doc.at("k").get<int>(),
                              doc.at("epsilon").get<double>());
    WeightAllocation alloc;
    alloc.probs = doc.at("probs").get<std::vector<double>>();
    check_probs_size(params, alloc);
    return {params, alloc};
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed allocation document: ") + e.what());
  }
}

std::uint64_t encode_permutation(const Permutation& pi, int n_servers) {
  return encode_base_n(pi.mapping, n_servers);
}

}  // namespace lpir
