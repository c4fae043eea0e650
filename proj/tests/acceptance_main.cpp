// Acceptance gate: ten end-to-end checks covering the retrieval protocol,
// the allocation optimizer, the audit tooling, and the tradeoff formulas.
// Each criterion prints one [PASS]/[FAIL] line; the process exits nonzero if
// any criterion fails its checks or overruns its runtime budget.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpir/allocation.hpp"
#include "lpir/audit.hpp"
#include "lpir/optimizer.hpp"
#include "lpir/protocol.hpp"
#include "lpir/rng.hpp"
#include "lpir/scheme.hpp"
#include "lpir/simplex.hpp"
#include "lpir/tradeoff.hpp"

#include "golden_tables.hpp"

namespace {

constexpr double kLn2 = 0.6931471805599453;

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

std::string describe(int n, int k, double eps) {
  std::ostringstream out;
  out << "N=" << n << " K=" << k << " eps=" << eps;
  return out.str();
}

// --- criterion 1: generated query/answer grids match the frozen tables -----

lpir::MessageStore golden_store() {
  static const std::uint8_t bytes[] = {0x11, 0x22, 0x40, 0x80};
  return lpir::MessageStore::from_bytes(lpir::SchemeParams(3, 2, 0.0), bytes);
}

void check_golden_rows(int message_index, const golden::Row* rows, int count) {
  const lpir::SchemeParams params(3, 2, 0.0);
  const lpir::MessageStore store = golden_store();
  for (int r = 0; r < count; ++r) {
    const golden::Row& row = rows[r];
    lpir::RandomKey key;
    key.f = lpir::make_key_vector({row.f}, params.n_servers);
    key.pi = lpir::make_permutation({row.pi[0], row.pi[1], row.pi[2]});
    const auto queries = lpir::make_queries(params, message_index, key);
    std::vector<lpir::Answer> answers;
    for (int n = 0; n < params.n_servers; ++n) {
      const std::string got = lpir::format_digits(queries[n].entries);
      require(got == row.q[n], "query mismatch at k=" + std::to_string(message_index) +
                                   " row " + std::to_string(r) + " server " +
                                   std::to_string(n + 1) + ": got " + got + " want " + row.q[n]);
      answers.push_back(lpir::answer_query(params, queries[n], store));
      const std::string want_a = row.a[n];
      if (want_a == "--") {
        require(answers.back().empty(), "expected an empty answer at row " + std::to_string(r) +
                                            " server " + std::to_string(n + 1));
      } else {
        require(!answers.back().empty(), "expected a payload at row " + std::to_string(r) +
                                             " server " + std::to_string(n + 1));
        const std::uint8_t want = static_cast<std::uint8_t>(store.symbol(1, want_a[0] - '0') ^
                                                            store.symbol(2, want_a[1] - '0'));
        require(answers.back().payload.value() == want,
                "answer mismatch at row " + std::to_string(r) + " server " +
                    std::to_string(n + 1));
      }
    }
    const auto decoded = lpir::decode(params, message_index, key, answers);
    const auto expected = store.message(message_index);
    require(decoded.size() == expected.size() &&
                std::equal(decoded.begin(), decoded.end(), expected.begin()),
            "decode mismatch at k=" + std::to_string(message_index) + " row " +
                std::to_string(r));
  }
}

void criterion_golden_tables() {
  check_golden_rows(1, golden::downshift_k1, 9);
  check_golden_rows(2, golden::downshift_k2, 9);
  check_golden_rows(1, golden::full_k1, 18);
  check_golden_rows(2, golden::full_k2, 18);
}

// --- criterion 2: reduced LP optimum equals the closed-form cost ------------

void criterion_reduced_lp() {
  for (int n : {2, 3, 4}) {
    for (int k : {2, 3, 4, 5}) {
      for (double eps : {0.0, 0.5, 1.0, 2.0}) {
        const lpir::SchemeParams params(n, k, eps);
        const lpir::SolveResult res = lpir::solve(lpir::build_p2(params));
        require(res.status == lpir::SolveStatus::optimal,
                "reduced LP not optimal at " + describe(n, k, eps) + ": " +
                    lpir::to_string(res.status));
        const double closed = lpir::cost_tsc(params);
        require(std::abs(res.value - closed) <= 1e-8,
                "reduced LP value " + std::to_string(res.value) + " vs closed form " +
                    std::to_string(closed) + " at " + describe(n, k, eps));
      }
    }
  }
}

// --- criterion 3: full LP agrees with the reduced LP ------------------------

void criterion_full_lp() {
  const std::pair<int, int> pairs[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}};
  for (auto [n, k] : pairs) {
    for (double eps : {0.0, 0.5, kLn2, 2.0}) {
      const lpir::SchemeParams params(n, k, eps);
      const lpir::Prop1Result res = lpir::verify_prop1(params);
      require(res.agree && std::abs(res.p1_value - res.p2_value) <= 1e-6,
              "full/reduced LP gap " + std::to_string(res.p1_value - res.p2_value) + " at " +
                  describe(n, k, eps));
    }
  }
}

// --- criterion 4: KKT certificate of the closed-form allocation -------------

void criterion_kkt() {
  for (int n : {2, 3, 4}) {
    for (int k : {2, 3, 4, 5}) {
      for (double eps : {0.0, 0.5, 1.0, 2.0}) {
        const lpir::SchemeParams params(n, k, eps);
        const lpir::KktCertificate cert = lpir::kkt_certificate(params);
        require(cert.max_residual <= 1e-9, "stationarity residual " +
                                               std::to_string(cert.max_residual) + " at " +
                                               describe(n, k, eps));
        for (const auto* duals : {&cert.mu, &cert.alpha_dual, &cert.beta_dual}) {
          for (double d : *duals) {
            require(d >= -1e-12, "negative dual " + std::to_string(d) + " at " +
                                     describe(n, k, eps));
          }
        }
        require(cert.max_slackness <= 1e-12, "complementary slackness " +
                                                 std::to_string(cert.max_slackness) + " at " +
                                                 describe(n, k, eps));
      }
    }
  }
  // Spot values for the worked instance.
  const lpir::KktCertificate cert = lpir::kkt_certificate(lpir::SchemeParams(2, 3, kLn2));
  require(std::abs(cert.lambda - 4.0 / 9.0) <= 1e-12,
          "lambda " + std::to_string(cert.lambda) + " != 4/9");
  require(cert.alpha_dual.size() == 2 && std::abs(cert.alpha_dual[0] - 10.0 / 9.0) <= 1e-12 &&
              std::abs(cert.alpha_dual[1] - 4.0 / 9.0) <= 1e-12,
          "ratio-constraint duals differ from (10/9, 4/9)");
}

// --- criterion 5: measured leakage equals the configured exponent -----------

void criterion_leakage() {
  const std::pair<int, int> pairs[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}};
  for (auto [n, k] : pairs) {
    for (double eps : {0.1, kLn2, 1.0, 3.0}) {
      const lpir::SchemeParams params(n, k, eps);
      for (bool baseline : {false, true}) {
        const lpir::WeightAllocation alloc =
            baseline ? lpir::samy_allocation(params) : lpir::optimal_allocation(params);
        const lpir::FullAllocation full = lpir::expand_to_full(params, alloc);
        const lpir::LeakageReport report = lpir::measure_leakage(params, full);
        require(std::abs(report.empirical_epsilon - eps) <= 1e-9,
                std::string(baseline ? "baseline" : "optimized") + " leakage " +
                    std::to_string(report.empirical_epsilon) + " != eps at " +
                    describe(n, k, eps));
      }
    }
  }
}

// --- criterion 6: exact and simulated costs match the closed form -----------

void criterion_cost_consistency() {
  const std::pair<int, int> pairs[] = {{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}};
  for (auto [n, k] : pairs) {
    for (double eps : {0.1, kLn2, 1.0, 3.0}) {
      const lpir::SchemeParams params(n, k, eps);
      const lpir::FullAllocation full =
          lpir::expand_to_full(params, lpir::optimal_allocation(params));
      const double exact = lpir::exact_download_cost(params, full);
      const double closed = lpir::cost_tsc(params);
      require(std::abs(exact - closed) <= 1e-12,
              "exact cost " + std::to_string(exact) + " vs closed form " +
                  std::to_string(closed) + " at " + describe(n, k, eps));
    }
  }
  struct McCase {
    int n, k;
    double eps;
  };
  for (const McCase& c : {McCase{3, 2, kLn2}, McCase{2, 3, 1.0}}) {
    const lpir::SchemeParams params(c.n, c.k, c.eps);
    const lpir::MonteCarloCost mc =
        lpir::monte_carlo_cost(params, lpir::optimal_allocation(params), 1, 1'000'000, 20260818);
    const double closed = lpir::cost_tsc(params);
    require(std::abs(mc.mean - closed) <= 4.0 * mc.std_error,
            "simulated cost " + std::to_string(mc.mean) + " outside 4 standard errors of " +
                std::to_string(closed) + " at " + describe(c.n, c.k, c.eps));
  }
}

// --- criterion 7: exhaustive decode over every key and permutation ----------

void criterion_exhaustive_decode() {
  for (int n = 2; n <= 7; ++n) {
    for (int k = 2;; ++k) {
      double triples = static_cast<double>(k);
      for (int i = 0; i < k - 1; ++i) triples *= n;
      for (int i = 2; i <= n; ++i) triples *= i;
      if (triples > 1e5) break;
      const lpir::SchemeParams params(n, k, 0.0);
      for (auto scope : {lpir::PermutationScope::cyclic, lpir::PermutationScope::all}) {
        require(lpir::verify_correctness(params, scope, /*store_seed=*/0x5eed + n * 100 + k),
                "decode failure at N=" + std::to_string(n) + " K=" + std::to_string(k) +
                    (scope == lpir::PermutationScope::all ? " (all permutations)"
                                                          : " (cyclic permutations)"));
      }
    }
  }
}

// --- criterion 8: exponent scaling at fixed download cost -------------------

void criterion_exponent_scaling() {
  const int n = 2;
  const double alpha = 0.5;
  const double d = 1.0 + alpha / (n - 1);
  double previous_gap = -1.0;
  for (int k = 3; k <= 64; ++k) {
    const lpir::ExponentBounds b = lpir::theorem1_bounds(n, k, d);
    const double tsc_cap = std::log(static_cast<double>(k - 1)) + std::log((n - 1) / alpha);
    const double ub_floor = (k - 2) * std::log(static_cast<double>(n)) +
                            std::log((1.0 - alpha) / alpha);
    require(b.eps_tsc <= tsc_cap + 1e-9, "optimized exponent " + std::to_string(b.eps_tsc) +
                                             " above its log-K cap at K=" + std::to_string(k));
    require(b.eps_ub >= ub_floor - 1e-9, "baseline exponent " + std::to_string(b.eps_ub) +
                                             " below its linear-K floor at K=" +
                                             std::to_string(k));
    const double gap = b.eps_ub - b.eps_tsc;
    require(gap > previous_gap,
            "exponent gap not increasing at K=" + std::to_string(k));
    previous_gap = gap;
  }
}

// --- criterion 9: cost curves stay ordered across the sweep grid ------------

void criterion_cost_ordering() {
  std::vector<double> grid(200);
  for (int i = 0; i < 200; ++i) grid[i] = 10.0 * i / 199.0;
  const std::pair<int, int> pairs[] = {{2, 3}, {3, 4}, {4, 6}, {8, 8}};
  for (auto [n, k] : pairs) {
    const auto points = lpir::sweep(n, k, grid);
    for (const lpir::TradeoffPoint& pt : points) {
      require(pt.d_lb <= pt.d_tsc + 1e-12, "lower bound above optimized cost at " +
                                               describe(n, k, pt.epsilon));
      require(pt.d_tsc <= pt.d_ub + 1e-12, "optimized cost above baseline at " +
                                               describe(n, k, pt.epsilon));
    }
  }
}

// --- criterion 10: two-message instances collapse to a single scheme --------

void criterion_two_message_coincidence() {
  for (int n = 2; n <= 8; ++n) {
    for (int e = 0; e <= 5; ++e) {
      const lpir::SchemeParams params(n, 2, static_cast<double>(e));
      require(std::abs(lpir::cost_tsc(params) - lpir::cost_ub(params)) <= 1e-12,
              "cost curves differ at " + describe(n, 2, e));
      const lpir::WeightAllocation opt = lpir::optimal_allocation(params);
      const lpir::WeightAllocation sam = lpir::samy_allocation(params);
      require(opt.probs.size() == 2 && sam.probs.size() == 2,
              "unexpected allocation length at " + describe(n, 2, e));
      for (int j = 0; j < 2; ++j) {
        require(std::abs(opt.probs[j] - sam.probs[j]) <= 1e-12,
                "allocations differ in class " + std::to_string(j) + " at " + describe(n, 2, e));
      }
    }
  }
}

struct Criterion {
  const char* name;
  double budget_seconds;  // <= 0 means no enforced budget
  void (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"golden-tables", 1.0, criterion_golden_tables},
      {"reduced-lp-matches-closed-form", 5.0, criterion_reduced_lp},
      {"full-lp-matches-reduced-lp", 60.0, criterion_full_lp},
      {"kkt-certificate", 0.0, criterion_kkt},
      {"leakage-tightness", 10.0, criterion_leakage},
      {"cost-consistency", 30.0, criterion_cost_consistency},
      {"exhaustive-decode", 30.0, criterion_exhaustive_decode},
      {"exponent-scaling", 1.0, criterion_exponent_scaling},
      {"cost-ordering", 1.0, criterion_cost_ordering},
      {"two-message-coincidence", 1.0, criterion_two_message_coincidence},
  };

  bool all_ok = true;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
      c.run();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty() && c.budget_seconds > 0.0 && seconds >= c.budget_seconds) {
      std::ostringstream msg;
      msg << "runtime " << seconds << " s exceeded the " << c.budget_seconds << " s budget";
      failure = msg.str();
    }
    if (failure.empty()) {
      std::printf("[PASS] C%d %s (%.0f ms)\n", index, c.name, seconds * 1000.0);
    } else {
      std::printf("[FAIL] C%d %s (%.0f ms): %s\n", index, c.name, seconds * 1000.0,
                  failure.c_str());
      all_ok = false;
    }
  }
  return all_ok ? 0 : 1;
}
