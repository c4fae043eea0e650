#include "lpir/optimizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lpir {

namespace {

std::vector<double> key_class_sizes_real(const SchemeParams& params) {
  const int kmax = params.n_messages - 1;
  std::vector<double> s(kmax + 1);
  s[0] = 1.0;
  for (int j = 0; j < kmax; ++j) {
    s[j + 1] = s[j] * (kmax - j) * (params.n_servers - 1) / (j + 1.0);
  }
  return s;
}

}  // namespace

LinearProgram build_p2(const SchemeParams& params) {
  const int k = params.n_messages;
  const int n = params.n_servers;
  const double ratio = std::exp(params.epsilon);
  const std::vector<double> s = key_class_sizes_real(params);

  LinearProgram lp;
  lp.objective.assign(k, 0.0);
  // Download cost (N/(N-1)) (1 - p_0) written as a linear term plus constant.
  lp.objective[0] = -n / (n - 1.0);
  lp.objective_constant = n / (n - 1.0);
  lp.lower_bounds.assign(k, 0.0);
  for (int j = 0; j < k; ++j) lp.var_names.push_back("p" + std::to_string(j));

  // Likelihood-ratio constraints between adjacent weight classes, both
  // directions: p_j <= e^eps p_{j+1} and p_{j+1} <= e^eps p_j.
  for (int j = 0; j + 1 < k; ++j) {
    LinearProgram::Row up{std::vector<double>(k, 0.0), 0.0};
    up.coeffs[j] = 1.0;
    up.coeffs[j + 1] = -ratio;
    lp.le_rows.push_back(std::move(up));
  }
  for (int j = 1; j < k; ++j) {
    LinearProgram::Row down{std::vector<double>(k, 0.0), 0.0};
    down.coeffs[j] = 1.0;
    down.coeffs[j - 1] = -ratio;
    lp.le_rows.push_back(std::move(down));
  }

  LinearProgram::Row norm{std::vector<double>(k, 0.0), 1.0};
  for (int j = 0; j < k; ++j) norm.coeffs[j] = n * s[j];
  lp.eq_rows.push_back(std::move(norm));
  return lp;
}

LinearProgram build_p1(const SchemeParams& params) {
  const int n = params.n_servers;
  const int k = params.n_messages;
  const std::int64_t n_keys = checked_pow(n, k - 1);
  const std::int64_t n_perms = checked_factorial(n);
  std::int64_t mass_vars;
  if (__builtin_mul_overflow(static_cast<std::int64_t>(k) * n_keys, n_perms, &mass_vars)) {
    throw std::overflow_error("variable count exceeds 64-bit range");
  }
  if (mass_vars + 1 > kMaxP1Variables) {
    std::ostringstream msg;
    msg << "full program needs K*N^(K-1)*N! + 1 = " << mass_vars + 1
        << " variables, above the guard of " << kMaxP1Variables;
    throw std::domain_error(msg.str());
  }
  const int nv = static_cast<int>(mass_vars) + 1;
  const int d_var = nv - 1;
  const double ratio = std::exp(params.epsilon);
  const double full_rate = n / (n - 1.0);

  const std::vector<Permutation> perms = enumerate_permutations(params, false, n_perms);
  const int np = static_cast<int>(perms.size());
  const auto var_of = [&](int k0, std::int64_t f_code, int perm_rank) {
    return static_cast<int>((static_cast<std::int64_t>(k0) * n_keys + f_code) * np + perm_rank);
  };

  // perm ranks grouped by the value pi(server): the query of one server pins
  // exactly that coordinate of the permutation.
  std::vector<std::vector<std::vector<int>>> ranks_by_value(
      n, std::vector<std::vector<int>>(n));
  for (int r = 0; r < np; ++r) {
    for (int server = 0; server < n; ++server) {
      ranks_by_value[server][perms[r].mapping[server]].push_back(r);
    }
  }

  LinearProgram lp;
  lp.objective.assign(nv, 0.0);
  lp.objective[d_var] = 1.0;
  lp.lower_bounds.assign(nv, 0.0);
  lp.lower_bounds[d_var] = -std::numeric_limits<double>::infinity();
  lp.var_names.reserve(nv);
  for (int k0 = 0; k0 < k; ++k0) {
    for (std::int64_t f_code = 0; f_code < n_keys; ++f_code) {
      const std::vector<int> f = decode_base_n(static_cast<std::uint64_t>(f_code), k - 1, n);
      for (int r = 0; r < np; ++r) {
        lp.var_names.push_back("p(k=" + std::to_string(k0 + 1) + ",f=" + format_digits(f) +
                               ",pi=" + format_digits(perms[r].mapping) + ")");
      }
    }
  }
  lp.var_names.push_back("d");

  // Epigraph rows: each message's expected download stays below d. With
  // direct-download mass p_d^k (zero key, any permutation),
  //   p_d^k + full_rate (1 - p_d^k) <= d.
  for (int k0 = 0; k0 < k; ++k0) {
    LinearProgram::Row row{std::vector<double>(nv, 0.0), -full_rate};
    for (int r = 0; r < np; ++r) row.coeffs[var_of(k0, 0, r)] = -full_rate + 1.0;
    row.coeffs[d_var] = -1.0;
    lp.le_rows.push_back(std::move(row));
  }

  // Likelihood-ratio rows: for every server, observable query, and ordered
  // message pair, P(q | k1) <= e^eps P(q | k2). The query pins the key to
  // q with coordinate k removed and the permutation's value at this server.
  const std::int64_t n_queries = checked_pow(n, k);
  std::vector<std::int64_t> f_code_of_k(k);
  std::vector<int> target_of_k(k);
  for (std::int64_t q_code = 0; q_code < n_queries; ++q_code) {
    const std::vector<int> q = decode_base_n(static_cast<std::uint64_t>(q_code), k, n);
    int total = 0;
    for (int digit : q) total += digit;
    for (int k0 = 0; k0 < k; ++k0) {
      std::int64_t f_code = 0;
      for (int m = 0; m < k; ++m) {
        if (m == k0) continue;
        f_code = f_code * n + q[m];
      }
      f_code_of_k[k0] = f_code;
      const int sigma = (total - q[k0]) % n;
      target_of_k[k0] = (q[k0] + sigma) % n;
    }
    for (int server = 0; server < n; ++server) {
      for (int k1 = 0; k1 < k; ++k1) {
        for (int k2 = 0; k2 < k; ++k2) {
          if (k1 == k2) continue;
          LinearProgram::Row row{std::vector<double>(nv, 0.0), 0.0};
          for (int r : ranks_by_value[server][target_of_k[k1]]) {
            row.coeffs[var_of(k1, f_code_of_k[k1], r)] += 1.0;
          }
          for (int r : ranks_by_value[server][target_of_k[k2]]) {
            row.coeffs[var_of(k2, f_code_of_k[k2], r)] -= ratio;
          }
          lp.le_rows.push_back(std::move(row));
        }
      }
    }
  }

  // One normalization row per message.
  for (int k0 = 0; k0 < k; ++k0) {
    LinearProgram::Row row{std::vector<double>(nv, 0.0), 1.0};
    for (std::int64_t f_code = 0; f_code < n_keys; ++f_code) {
      for (int r = 0; r < np; ++r) row.coeffs[var_of(k0, f_code, r)] = 1.0;
    }
    lp.eq_rows.push_back(std::move(row));
  }
  return lp;
}

Prop1Result verify_prop1(const SchemeParams& params) {
  const SolveResult full = solve(build_p1(params));
  if (full.status != SolveStatus::optimal) {
    throw std::runtime_error("full program solve failed: " + to_string(full.status));
  }
  const SolveResult reduced = solve(build_p2(params));
  if (reduced.status != SolveStatus::optimal) {
    throw std::runtime_error("reduced program solve failed: " + to_string(reduced.status));
  }
  Prop1Result result;
  result.p1_value = full.value;
  result.p2_value = reduced.value;
  result.agree = std::abs(full.value - reduced.value) <= 1e-6;
  return result;
}

KktCertificate kkt_certificate(const SchemeParams& params) {
  const int k = params.n_messages;
  const int n = params.n_servers;
  const double eps = params.epsilon;
  const double ratio = std::exp(eps);
  const std::vector<double> s = key_class_sizes_real(params);

  // Weighted masses w_j = s_j e^{-j eps}; their total is the layer factor
  // (1 + (N-1) e^{-eps})^{K-1}. Tail sums feed the inequality multipliers
  // without cancellation.
  std::vector<double> w(k);
  for (int j = 0; j < k; ++j) w[j] = s[j] * std::exp(-j * eps);
  std::vector<double> tail(k + 1, 0.0);
  for (int j = k - 1; j >= 0; --j) tail[j] = tail[j + 1] + w[j];
  const double total = tail[0];

  KktCertificate cert;
  cert.primal = optimal_allocation(params);
  cert.lambda = 1.0 / ((n - 1) * total);
  cert.mu.assign(k, 0.0);
  cert.beta_dual.assign(k - 1, 0.0);
  cert.alpha_dual.resize(k - 1);
  for (int j = 0; j + 1 < k; ++j) {
    cert.alpha_dual[j] = n / (n - 1.0) * std::exp(j * eps) * tail[j + 1] / total;
  }

  // Stationarity of the Lagrangian in each p_j: the objective gradient plus
  // lambda times the normalization column plus the inequality multipliers.
  cert.stationarity_residuals.resize(k);
  for (int j = 0; j < k; ++j) {
    double r = cert.lambda * n * s[j];
    if (j == 0) r += -n / (n - 1.0);
    if (j <= k - 2) r += cert.alpha_dual[j];
    if (j >= 1) r -= ratio * cert.alpha_dual[j - 1];
    cert.stationarity_residuals[j] = r;
  }
  cert.max_residual = 0.0;
  for (double r : cert.stationarity_residuals) {
    cert.max_residual = std::max(cert.max_residual, std::abs(r));
  }

  // Complementary slackness: mu_j p_j, alpha_j (p_j - e^eps p_{j+1}), and
  // beta_j (p_j - e^eps p_{j-1}).
  const std::vector<double>& p = cert.primal.probs;
  for (int j = 0; j < k; ++j) cert.slackness_products.push_back(cert.mu[j] * p[j]);
  for (int j = 0; j + 1 < k; ++j) {
    cert.slackness_products.push_back(cert.alpha_dual[j] * (p[j] - ratio * p[j + 1]));
  }
  for (int j = 1; j < k; ++j) {
    cert.slackness_products.push_back(cert.beta_dual[j - 1] * (p[j] - ratio * p[j - 1]));
  }
  cert.max_slackness = 0.0;
  for (double v : cert.slackness_products) {
    cert.max_slackness = std::max(cert.max_slackness, std::abs(v));
  }
  return cert;
}

}  // namespace lpir
