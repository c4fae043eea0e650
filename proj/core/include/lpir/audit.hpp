#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lpir/allocation.hpp"
#include "lpir/scheme.hpp"

namespace lpir {

/// Exact distribution of the query seen by one server when one message is
/// retrieved, as implied by a full allocation.
struct QueryDistribution {
  int server = 0;   ///< n in [1:N]
  int message = 0;  ///< k in [1:K]
  /// base-N query code -> probability; zero-probability queries are omitted.
  std::map<std::uint64_t, double> probs;
};

/// A (server, query, message pair) at which the worst likelihood ratio is
/// attained.
struct LeakageWitness {
  int server = 0;
  std::uint64_t query_code = 0;
  int k1 = 0;
  int k2 = 0;
};

struct LeakageReport {
  /// max over servers, queries, and ordered message pairs of
  /// log P(q | k1) / P(q | k2); +infinity when some query is possible under
  /// k1 but impossible under k2. Pairs impossible under both are skipped.
  double empirical_epsilon = 0.0;
  LeakageWitness witness;
  std::vector<double> per_server_eps;  ///< index n-1
};

struct MonteCarloCost {
  double mean;       ///< average downloaded symbols per retrieved symbol
  double std_error;  ///< sample standard error of the mean
};

/// Default audit enumeration guards: the number of (message, key,
/// permutation) triples K * N^{K-1} * |scope| may not exceed these.
inline constexpr std::int64_t kAuditGuardAllPerms = 1'000'000;
inline constexpr std::int64_t kAuditGuardCyclic = 10'000'000;

/// Pushes the full allocation through query generation for server n and
/// message k. guard_override replaces the scope's default entry limit.
QueryDistribution query_distribution(const SchemeParams& params, const FullAllocation& alloc,
                                     int message_index, int server,
                                     std::int64_t guard_override = 0);

/// Measures the realized leakage exponent of a full allocation across all
/// servers and ordered message pairs.
LeakageReport measure_leakage(const SchemeParams& params, const FullAllocation& alloc,
                              std::int64_t guard_override = 0);

/// Expected downloaded symbols per retrieved symbol, maximized over the
/// retrieved message: with direct-download mass p_d (all-zero key),
///   D_k = p_d + (N / (N-1)) (1 - p_d).
double exact_download_cost(const SchemeParams& params, const FullAllocation& alloc,
                           std::int64_t guard_override = 0);

/// Simulates retrievals of one message and reports the empirical download
/// cost. Trial t uses the sub-seed derive(seed, t), so results are
/// reproducible and independent of execution order.
MonteCarloCost monte_carlo_cost(const SchemeParams& params, const WeightAllocation& alloc,
                                int message_index, std::int64_t trials, std::uint64_t seed);

/// Replays every (message, key, permutation) triple in the scope against a
/// pseudorandom store and checks that decoding returns the stored message.
bool verify_correctness(const SchemeParams& params, PermutationScope scope,
                        std::uint64_t store_seed, std::int64_t guard_override = 0);

/// Leakage report serialization (infinite exponents rendered as a string).
nlohmann::json leakage_report_to_json(const SchemeParams& params, const LeakageReport& report);

}  // namespace lpir
