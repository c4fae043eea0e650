#pragma once

#include <string>
#include <vector>

namespace lpir {

/// Dense linear program in the form
///   minimize    objective . x + objective_constant
///   subject to  eq_rows:  coeffs . x  = rhs
///               le_rows:  coeffs . x <= rhs
///               x_i >= lower_bounds[i]  (0 for nonnegative, -infinity free)
struct LinearProgram {
  struct Row {
    std::vector<double> coeffs;
    double rhs = 0.0;
  };

  std::vector<double> objective;
  double objective_constant = 0.0;
  std::vector<Row> eq_rows;
  std::vector<Row> le_rows;
  std::vector<double> lower_bounds;
  std::vector<std::string> var_names;

  int num_vars() const { return static_cast<int>(objective.size()); }

  /// Plain-text rendering of the program (objective, rows, bounds) for
  /// debugging and file dumps.
  std::string dump() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

std::string to_string(SolveStatus status);

struct SolveResult {
  SolveStatus status = SolveStatus::optimal;
  double value = 0.0;              ///< objective at the optimum, incl. constant
  std::vector<double> solution;    ///< one value per original variable
  long iterations = 0;
};

struct SimplexOptions {
  double pivot_tol = 1e-10;        ///< entries below this are treated as zero
  double feasibility_tol = 1e-8;   ///< phase-1 objective above this = infeasible
  long max_iterations = 200000;
  /// Pivots without objective improvement before switching from Dantzig
  /// pricing to Bland's rule. Dantzig pricing resumes once the objective
  /// strictly improves; termination is preserved because Bland's rule cannot
  /// cycle and the objective visits finitely many basis values.
  long stall_before_bland = 256;
};

/// Two-phase dense tableau simplex. Free variables are split internally; the
/// returned solution is expressed in the original variables.
SolveResult solve(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace lpir
