#pragma once

#include <vector>

#include "lpir/allocation.hpp"
#include "lpir/scheme.hpp"
#include "lpir/simplex.hpp"

namespace lpir {

/// Largest variable count accepted by build_p1 (including the epigraph
/// variable).
inline constexpr int kMaxP1Variables = 5000;

/// Reduced download-cost program over weight classes: K variables p_0..p_{K-1},
/// objective (N/(N-1)) (1 - p_0) via a constant term, adjacency constraints
/// p_j <= e^eps p_{j+1} and p_{j+1} <= e^eps p_j, and the normalization
/// sum_j N s_j p_j = 1.
LinearProgram build_p2(const SchemeParams& params);

/// Full download-cost program over per-message distributions of (key,
/// permutation) pairs: K * N^{K-1} * N! mass variables plus one epigraph
/// variable d bounding every message's expected download, likelihood-ratio
/// constraints for every (server, query, ordered message pair), and one
/// normalization row per message.
/// Throws std::domain_error when the variable count would exceed
/// kMaxP1Variables.
LinearProgram build_p1(const SchemeParams& params);

struct Prop1Result {
  double p1_value = 0.0;
  double p2_value = 0.0;
  bool agree = false;  ///< |p1_value - p2_value| <= 1e-6
};

/// Solves both programs and checks that the reduction loses nothing.
Prop1Result verify_prop1(const SchemeParams& params);

/// Optimality certificate of the closed-form allocation for the reduced
/// program: dual multipliers in closed form, the stationarity residual of
/// every weight class, and the complementary slackness products.
struct KktCertificate {
  WeightAllocation primal;                     ///< optimal_allocation(params)
  double lambda = 0.0;                         ///< normalization multiplier
  std::vector<double> mu;                      ///< p_j >= 0 multipliers (all zero)
  std::vector<double> alpha_dual;              ///< p_j <= e^eps p_{j+1} multipliers
  std::vector<double> beta_dual;               ///< p_j <= e^eps p_{j-1} multipliers (all zero)
  std::vector<double> stationarity_residuals;  ///< one per weight class
  double max_residual = 0.0;
  std::vector<double> slackness_products;      ///< every multiplier * its slack
  double max_slackness = 0.0;
};

KktCertificate kkt_certificate(const SchemeParams& params);

}  // namespace lpir
