#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpir/optimizer.hpp"
#include "lpir/simplex.hpp"
#include "lpir/tradeoff.hpp"

using namespace lpir;

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

LinearProgram tiny_lp() {
  // minimize -x - y  s.t.  x + y <= 1, x,y >= 0  ->  optimum -1.
  LinearProgram lp;
  lp.objective = {-1.0, -1.0};
  lp.le_rows.push_back({{1.0, 1.0}, 1.0});
  lp.lower_bounds = {0.0, 0.0};
  lp.var_names = {"x", "y"};
  return lp;
}

}  // namespace

TEST_CASE("simplex solves basic programs") {
  SUBCASE("bounded inequality program") {
    const auto result = solve(tiny_lp());
    REQUIRE(result.status == SolveStatus::optimal);
    CHECK(result.value == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(result.solution[0] + result.solution[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("equality rows force phase one") {
    // minimize x  s.t.  x + y = 2, y <= 1  ->  x = 1.
    LinearProgram lp;
    lp.objective = {1.0, 0.0};
    lp.eq_rows.push_back({{1.0, 1.0}, 2.0});
    lp.le_rows.push_back({{0.0, 1.0}, 1.0});
    lp.lower_bounds = {0.0, 0.0};
    lp.var_names = {"x", "y"};
    const auto result = solve(lp);
    REQUIRE(result.status == SolveStatus::optimal);
    CHECK(result.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.solution[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(result.solution[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("negative right-hand sides are normalized internally") {
    // minimize x  s.t.  -x <= -3  ->  x = 3.
    LinearProgram lp;
    lp.objective = {1.0};
    lp.le_rows.push_back({{-1.0}, -3.0});
    lp.lower_bounds = {0.0};
    lp.var_names = {"x"};
    const auto result = solve(lp);
    REQUIRE(result.status == SolveStatus::optimal);
    CHECK(result.solution[0] == doctest::Approx(3.0).epsilon(1e-12));
  }
  SUBCASE("free variables can go negative") {
    // minimize d  s.t.  -d <= 5, d free  ->  d = -5.
    LinearProgram lp;
    lp.objective = {1.0};
    lp.le_rows.push_back({{-1.0}, 5.0});
    lp.lower_bounds = {kNegInf};
    lp.var_names = {"d"};
    const auto result = solve(lp);
    REQUIRE(result.status == SolveStatus::optimal);
    CHECK(result.value == doctest::Approx(-5.0).epsilon(1e-12));
  }
  SUBCASE("objective constant is carried through") {
    LinearProgram lp = tiny_lp();
    lp.objective_constant = 10.0;
    const auto result = solve(lp);
    CHECK(result.value == doctest::Approx(9.0).epsilon(1e-12));
  }
}

TEST_CASE("simplex classifies infeasible, unbounded, and truncated programs") {
  SUBCASE("infeasible") {
    // x <= -1 with x >= 0.
    LinearProgram lp;
    lp.objective = {1.0};
    lp.le_rows.push_back({{1.0}, -1.0});
    lp.lower_bounds = {0.0};
    lp.var_names = {"x"};
    CHECK(solve(lp).status == SolveStatus::infeasible);
  }
  SUBCASE("unbounded") {
    LinearProgram lp;
    lp.objective = {-1.0};
    lp.lower_bounds = {0.0};
    lp.var_names = {"x"};
    CHECK(solve(lp).status == SolveStatus::unbounded);
  }
  SUBCASE("iteration limit") {
    LinearProgram lp = tiny_lp();
    SimplexOptions options;
    options.max_iterations = 0;
    CHECK(solve(lp, options).status == SolveStatus::iteration_limit);
  }
  CHECK(to_string(SolveStatus::optimal) == "optimal");
  CHECK(to_string(SolveStatus::infeasible) == "infeasible");
  CHECK(to_string(SolveStatus::unbounded) == "unbounded");
  CHECK(to_string(SolveStatus::iteration_limit) == "iteration limit reached");
}

TEST_CASE("program dumps name the variables and row kinds") {
  const auto text = tiny_lp().dump();
  CHECK(text.find("minimize") != std::string::npos);
  CHECK(text.find("x") != std::string::npos);
  CHECK(text.find("<=") != std::string::npos);
}

TEST_CASE("degenerate programs terminate under the Bland fallback") {
  // A classic cycling-prone instance (Beale). Dantzig pricing may stall on
  // it; the stall counter must hand over to Bland's rule and finish.
  LinearProgram lp;
  lp.objective = {-0.75, 150.0, -0.02, 6.0};
  lp.le_rows.push_back({{0.25, -60.0, -0.04, 9.0}, 0.0});
  lp.le_rows.push_back({{0.5, -90.0, -0.02, 3.0}, 0.0});
  lp.le_rows.push_back({{0.0, 0.0, 1.0, 0.0}, 1.0});
  lp.lower_bounds = {0.0, 0.0, 0.0, 0.0};
  lp.var_names = {"x1", "x2", "x3", "x4"};
  const auto result = solve(lp);
  REQUIRE(result.status == SolveStatus::optimal);
  CHECK(result.value == doctest::Approx(-0.05).epsilon(1e-10));
}

TEST_CASE("reduced program structure matches its definition") {
  SchemeParams params(2, 3, kLn2);
  const auto lp = build_p2(params);
  CHECK(lp.num_vars() == 3);
  CHECK(lp.eq_rows.size() == 1);
  CHECK(lp.le_rows.size() == 4);  // two directions per adjacent pair
  CHECK(lp.var_names[0] == "p0");
  // Normalization coefficients are N * s_j.
  CHECK(lp.eq_rows[0].coeffs == std::vector<double>{2.0, 4.0, 2.0});
  CHECK(lp.eq_rows[0].rhs == 1.0);
  // Objective: N/(N-1) (1 - p_0) = constant + (-N/(N-1)) p_0.
  CHECK(lp.objective[0] == doctest::Approx(-2.0));
  CHECK(lp.objective[1] == 0.0);
  CHECK(lp.objective_constant == doctest::Approx(2.0));
}

TEST_CASE("reduced program optimum equals the closed-form cost") {
  for (int n : {2, 3, 4}) {
    for (int k : {2, 3, 4, 5}) {
      for (double eps : {0.0, 0.5, 1.0, 2.0}) {
        CAPTURE(n);
        CAPTURE(k);
        CAPTURE(eps);
        SchemeParams params(n, k, eps);
        const auto result = solve(build_p2(params));
        REQUIRE(result.status == SolveStatus::optimal);
        CHECK(result.value == doctest::Approx(cost_tsc(params)).epsilon(1e-9));
        // The argmin is the closed-form allocation.
        const auto alloc = optimal_allocation(params);
        for (int j = 0; j < k; ++j) {
          CHECK(result.solution[j] == doctest::Approx(alloc.probs[j]).epsilon(1e-7));
        }
      }
    }
  }
}

TEST_CASE("baseline allocation is feasible but not better") {
  SchemeParams params(2, 4, 1.0);
  const auto lp = build_p2(params);
  const auto base = samy_allocation(params);
  // Evaluate the objective at the baseline point.
  double value = lp.objective_constant;
  for (int j = 0; j < 4; ++j) value += lp.objective[j] * base.probs[j];
  CHECK(value == doctest::Approx(cost_ub(params)).epsilon(1e-12));
  const auto result = solve(lp);
  CHECK(result.value <= value + 1e-9);
}

TEST_CASE("full program counts variables and rows correctly") {
  {
    SchemeParams params(2, 2, kLn2);
    const auto lp = build_p1(params);
    // 2 messages * 2 keys * 2 permutations + epigraph = 9.
    CHECK(lp.num_vars() == 9);
    CHECK(lp.eq_rows.size() == 2);   // one normalization per message
    CHECK(lp.var_names.back() == "d");
    CHECK(lp.lower_bounds.back() == kNegInf);
  }
  {
    SchemeParams params(3, 2, kLn2);
    const auto lp = build_p1(params);
    CHECK(lp.num_vars() == 2 * 3 * 6 + 1);  // 37
    CHECK(lp.eq_rows.size() == 2);
    // 2 epigraph rows + per-server likelihood-ratio rows: 3 servers * 9
    // queries * 2 ordered pairs = 54.
    CHECK(lp.le_rows.size() == 2 + 54);
  }
  CHECK_THROWS_AS(build_p1(SchemeParams(4, 4, 1.0)), std::domain_error);
  CHECK_THROWS_WITH_AS(build_p1(SchemeParams(4, 4, 1.0)), doctest::Contains("6145"),
                       std::domain_error);
}

TEST_CASE("full program relaxation loses nothing on small instances") {
  for (double eps : {0.0, kLn2, 2.0}) {
    CAPTURE(eps);
    const auto result = verify_prop1(SchemeParams(2, 2, eps));
    CHECK(result.agree);
    CHECK(result.p2_value == doctest::Approx(cost_tsc(SchemeParams(2, 2, eps))).epsilon(1e-8));
  }
  const auto r33 = verify_prop1(SchemeParams(3, 3, 1.0));
  CHECK(r33.agree);
  CHECK(std::abs(r33.p1_value - r33.p2_value) <= 1e-6);
}

TEST_CASE("optimality certificate: spot duals and residual bounds") {
  {
    const auto cert = kkt_certificate(SchemeParams(2, 3, kLn2));
    CHECK(cert.lambda == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    REQUIRE(cert.alpha_dual.size() == 2);
    CHECK(cert.alpha_dual[0] == doctest::Approx(10.0 / 9.0).epsilon(1e-12));
    CHECK(cert.alpha_dual[1] == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(cert.max_residual <= 1e-12);
    CHECK(cert.max_slackness <= 1e-12);
    for (double m : cert.mu) CHECK(m == 0.0);
    for (double b : cert.beta_dual) CHECK(b == 0.0);
    // The certificate certifies the closed-form allocation itself.
    const auto alloc = optimal_allocation(SchemeParams(2, 3, kLn2));
    CHECK(cert.primal.probs == alloc.probs);
  }
  for (auto [n, k] : {std::pair{2, 2}, {2, 3}, {3, 2}, {3, 3}, {2, 4}, {4, 5}}) {
    for (double eps : {0.0, 0.5, kLn2, 2.0}) {
      CAPTURE(n);
      CAPTURE(k);
      CAPTURE(eps);
      const auto cert = kkt_certificate(SchemeParams(n, k, eps));
      CHECK(cert.max_residual <= 1e-9);
      CHECK(cert.max_slackness <= 1e-12);
      CHECK(cert.lambda > 0.0);
      for (double a : cert.alpha_dual) CHECK(a >= -1e-12);
      REQUIRE(cert.stationarity_residuals.size() == static_cast<std::size_t>(k));
    }
  }
}
