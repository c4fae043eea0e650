#include "lpir/tradeoff.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lpir/scheme.hpp"

namespace lpir {

namespace {

// alpha = (D - 1)(N - 1) in (0, 1 - N^{1-K}]; validated once per inversion.
double excess_fraction(int n, int k, double d) {
  SchemeParams::check_counts(n, k);
  const double d_max = max_feasible_cost(n, k);
  if (!std::isfinite(d) || d <= 1.0 || d > d_max + 1e-12) {
    std::ostringstream msg;
    msg << "download cost " << d << " outside the feasible interval (1, " << d_max << "]";
    throw std::domain_error(msg.str());
  }
  return (d - 1.0) * (n - 1);
}

// Inversions can land at a tiny negative epsilon when d sits at the feasible
// boundary; snap those to the exact perfect-privacy exponent.
double clamp_epsilon(double eps) {
  return (eps < 0.0 && eps > -1e-9) ? 0.0 : eps;
}

}  // namespace

double cost_tsc(const SchemeParams& params) {
  const double layer = std::log1p((params.n_servers - 1) * std::exp(-params.epsilon));
  return 1.0 + (-std::expm1(-(params.n_messages - 1) * layer)) / (params.n_servers - 1);
}

double cost_ub(const SchemeParams& params) {
  const double tail = std::pow(static_cast<double>(params.n_servers), params.n_messages - 1) - 1.0;
  return 1.0 + tail / ((params.n_servers - 1) * (std::exp(params.epsilon) + tail));
}

double cost_lb(const SchemeParams& params) {
  const double ratio = std::exp(-params.epsilon) / params.n_servers;
  double total = 1.0;
  double term = 1.0;
  for (int i = 1; i < params.n_messages; ++i) {
    term *= ratio;
    total += term;
  }
  return total;
}

double max_feasible_cost(int n, int k) {
  SchemeParams::check_counts(n, k);
  return 1.0 + (1.0 - std::pow(static_cast<double>(n), 1 - k)) / (n - 1);
}

double eps_tsc_from_cost(int n, int k, double d) {
  const double alpha = excess_fraction(n, k, d);
  // Invert alpha = 1 - r^{K-1} with r = e^eps / (e^eps + N - 1):
  // eps = log(N-1) + log r - log(1 - r).
  const double log_r = std::log1p(-alpha) / (k - 1);
  const double one_minus_r = -std::expm1(log_r);
  return clamp_epsilon(std::log(static_cast<double>(n - 1)) + log_r - std::log(one_minus_r));
}

double eps_ub_from_cost(int n, int k, double d) {
  const double alpha = excess_fraction(n, k, d);
  // Invert alpha = (N^{K-1} - 1) / (e^eps + N^{K-1} - 1):
  // eps = log((1 - alpha)/alpha) + log(N^{K-1} - 1).
  const double log_tail = (k - 1) * std::log(static_cast<double>(n)) +
                          std::log1p(-std::pow(static_cast<double>(n), 1 - k));
  return clamp_epsilon(std::log1p(-alpha) - std::log(alpha) + log_tail);
}

ExponentBounds theorem1_bounds(int n, int k, double d) {
  ExponentBounds b{};
  b.alpha = excess_fraction(n, k, d);
  b.eps_tsc = eps_tsc_from_cost(n, k, d);
  b.eps_ub = eps_ub_from_cost(n, k, d);
  const double log_odds = std::log1p(-b.alpha) - std::log(b.alpha);
  const double log_n = std::log(static_cast<double>(n));
  b.tsc_upper = std::log(static_cast<double>(k - 1)) + std::log((n - 1) / b.alpha);
  b.ub_upper = (k - 1) * log_n + log_odds;
  b.ub_lower = (k - 2) * log_n + log_odds;
  if (!(b.eps_tsc <= b.tsc_upper + 1e-9) || !(b.eps_ub <= b.ub_upper + 1e-9) ||
      !(b.eps_ub >= b.ub_lower - 1e-9)) {
    throw std::logic_error("scaling bounds violated");
  }
  return b;
}

std::vector<TradeoffPoint> sweep(int n, int k, std::span<const double> eps_grid) {
  SchemeParams::check_counts(n, k);
  std::vector<TradeoffPoint> points;
  points.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    const SchemeParams params(n, k, eps);
    points.push_back(TradeoffPoint{eps, cost_tsc(params), cost_ub(params), cost_lb(params)});
  }
  return points;
}

}  // namespace lpir
