#pragma once

#include <span>
#include <vector>

namespace lpir {

struct SchemeParams;

/// One point of the leakage/download tradeoff.
struct TradeoffPoint {
  double epsilon;   ///< leakage exponent in nats
  double d_tsc;     ///< download cost of the optimized layered scheme
  double d_ub;      ///< download cost of the baseline scheme (upper bound)
  double d_lb;      ///< converse lower bound on the download cost
};

/// Leakage exponents achieved at a fixed download cost, with the closed-form
/// scaling bounds they must respect.
struct ExponentBounds {
  double alpha;      ///< (D - 1)(N - 1), excess download normalized to (0, 1)
  double eps_tsc;    ///< exponent of the optimized scheme at cost D
  double eps_ub;     ///< exponent of the baseline scheme at cost D
  double tsc_upper;  ///< log(K-1) + log((N-1)/alpha), O(log K) ceiling
  double ub_upper;   ///< (K-1) log N + log((1-alpha)/alpha)
  double ub_lower;   ///< (K-2) log N + log((1-alpha)/alpha)
};

/// Download cost of the optimized layered scheme:
///   D(eps) = 1 + (1 - (e^eps / (e^eps + N - 1))^{K-1}) / (N - 1),
/// evaluated via log1p/expm1 so large K * eps stays accurate.
double cost_tsc(const SchemeParams& params);

/// Download cost of the baseline scheme:
///   D(eps) = 1 + (N^{K-1} - 1) / ((N - 1)(e^eps + N^{K-1} - 1)).
double cost_ub(const SchemeParams& params);

/// Converse lower bound on any scheme's download cost:
///   D(eps) >= 1 + sum_{i=1}^{K-1} (N e^eps)^{-i}.
double cost_lb(const SchemeParams& params);

/// Largest feasible download cost, attained at eps = 0 (perfect privacy):
///   D_max = 1 + (1 - N^{1-K}) / (N - 1).
double max_feasible_cost(int n, int k);

/// Inverts cost_tsc: the leakage exponent whose optimized-scheme cost is d.
/// Throws std::domain_error naming the feasible interval (1, D_max] when d
/// lies outside it.
double eps_tsc_from_cost(int n, int k, double d);

/// Inverts cost_ub for the baseline scheme. Same domain contract.
double eps_ub_from_cost(int n, int k, double d);

/// Evaluates both inversions and the closed-form scaling bounds at cost d.
ExponentBounds theorem1_bounds(int n, int k, double d);

/// Evaluates all three cost curves on an epsilon grid.
std::vector<TradeoffPoint> sweep(int n, int k, std::span<const double> eps_grid);

}  // namespace lpir
