#include "lpir/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lpir {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_program(const LinearProgram& lp) {
  const std::size_t n = lp.objective.size();
  if (n == 0) throw std::invalid_argument("program has no variables");
  if (lp.lower_bounds.size() != n) {
    throw std::invalid_argument("lower_bounds size does not match the variable count");
  }
  if (!lp.var_names.empty() && lp.var_names.size() != n) {
    throw std::invalid_argument("var_names size does not match the variable count");
  }
  for (double b : lp.lower_bounds) {
    if (!(b == 0.0 || b == -kInf)) {
      throw std::invalid_argument("lower bounds must be 0 or -infinity");
    }
  }
  const auto check_row = [n](const LinearProgram::Row& row) {
    if (row.coeffs.size() != n) {
      throw std::invalid_argument("row width does not match the variable count");
    }
    for (double c : row.coeffs) {
      if (!std::isfinite(c)) throw std::invalid_argument("non-finite row coefficient");
    }
    if (!std::isfinite(row.rhs)) throw std::invalid_argument("non-finite right-hand side");
  };
  for (const auto& row : lp.eq_rows) check_row(row);
  for (const auto& row : lp.le_rows) check_row(row);
  for (double c : lp.objective) {
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite objective coefficient");
  }
}

// Dense tableau over columns [structural | slacks | artificials] with an
// explicit basis; rows keep b >= 0 throughout.
struct Tableau {
  std::vector<std::vector<double>> rows;
  std::vector<double> b;
  std::vector<int> basis;
  int cols = 0;

  void pivot(int r, int c) {
    const double p = rows[r][c];
    const double inv = 1.0 / p;
    for (double& v : rows[r]) v *= inv;
    rows[r][c] = 1.0;
    b[r] *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (static_cast<int>(i) == r) continue;
      const double f = rows[i][c];
      if (f == 0.0) continue;
      for (int j = 0; j < cols; ++j) rows[i][j] -= f * rows[r][j];
      rows[i][c] = 0.0;
      b[i] -= f * b[r];
      // Absorbs the slack the ratio test may leave behind on near-tie rows.
      if (b[i] < 0.0 && b[i] > -1e-8) b[i] = 0.0;
    }
    basis[r] = c;
  }
};

enum class CoreStatus { optimal, unbounded, iteration_limit };

// How many pivots may reuse incrementally updated reduced costs before they
// are recomputed from the basis. Incremental updates drift by rounding; left
// unchecked, phantom negative entries keep the loop pivoting at the optimum.
constexpr long kReducedRefreshInterval = 256;

// Smallest element the ratio test accepts as a pivot. Dividing a row by a
// near-tolerance element scales the tableau by ~1e10 and destroys it; a
// column whose positive entries are all below this is treated as numerically
// nonpositive instead.
constexpr double kMinPivot = 1e-9;

// Harris-style feasibility slack: rows whose ratio exceeds the strict
// minimum by at most this much still qualify as pivot rows, letting the
// largest (most stable) element win among near-ties.
constexpr double kRatioSlack = 1e-9;

// Runs pivots for one phase. cost covers every column (zeros where unused);
// first_banned marks the start of columns excluded from entering (artificial
// columns during phase 2). Objective values at or below objective_floor are
// provably optimal and stop the phase early (the phase-1 cost is a sum of
// nonnegative variables, so 0 is a certificate; pass -infinity to disable).
CoreStatus run_phase(Tableau& t, const std::vector<double>& cost, int first_banned,
                     const SimplexOptions& opt, long& iterations, double objective_floor) {
  const int m = static_cast<int>(t.rows.size());
  std::vector<double> reduced;
  const auto refresh_reduced = [&]() {
    reduced = cost;
    for (int i = 0; i < m; ++i) {
      const double cb = cost[t.basis[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j < t.cols; ++j) reduced[j] -= cb * t.rows[i][j];
    }
    for (int i = 0; i < m; ++i) reduced[t.basis[i]] = 0.0;
  };
  refresh_reduced();

  const auto objective = [&]() {
    double z = 0.0;
    for (int i = 0; i < m; ++i) z += cost[t.basis[i]] * t.b[i];
    return z;
  };

  const auto pick_entering = [&](bool bland) {
    if (bland) {
      for (int j = 0; j < first_banned; ++j) {
        if (reduced[j] < -opt.pivot_tol) return j;
      }
      return -1;
    }
    int entering = -1;
    double best = -opt.pivot_tol;
    for (int j = 0; j < first_banned; ++j) {
      if (reduced[j] < best) {
        best = reduced[j];
        entering = j;
      }
    }
    return entering;
  };

  bool bland = false;
  long stalled = 0;
  long pivots_since_refresh = 0;
  double last_obj = objective();
  while (true) {
    if (iterations++ >= opt.max_iterations) return CoreStatus::iteration_limit;
    if (objective() <= objective_floor) return CoreStatus::optimal;

    int entering = pick_entering(bland);
    if (entering < 0) {
      // Confirm optimality against exactly recomputed reduced costs: the
      // incremental vector may have drifted in either direction.
      refresh_reduced();
      pivots_since_refresh = 0;
      entering = pick_entering(bland);
      if (entering < 0) return CoreStatus::optimal;
    }

    int leaving = -1;
    bool tiny_column = false;
    if (bland) {
      // Exact minimum ratio with the smallest-basis-index tie-break.
      double best_ratio = kInf;
      for (int i = 0; i < m; ++i) {
        const double a = t.rows[i][entering];
        if (a <= opt.pivot_tol) continue;
        if (a < kMinPivot) {
          tiny_column = true;
          continue;
        }
        const double ratio = std::max(t.b[i], 0.0) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leaving < 0 || t.basis[i] < t.basis[leaving]))) {
          best_ratio = ratio;
          leaving = i;
        }
      }
    } else {
      // Two-pass ratio test: find the tightest step with a small feasibility
      // slack, then pivot on the largest element among the qualifying rows.
      double limit = kInf;
      for (int i = 0; i < m; ++i) {
        const double a = t.rows[i][entering];
        if (a <= opt.pivot_tol) continue;
        if (a < kMinPivot) {
          tiny_column = true;
          continue;
        }
        limit = std::min(limit, (std::max(t.b[i], 0.0) + kRatioSlack) / a);
      }
      double best_a = 0.0;
      for (int i = 0; i < m; ++i) {
        const double a = t.rows[i][entering];
        if (a < kMinPivot) continue;
        if (std::max(t.b[i], 0.0) / a <= limit && a > best_a) {
          best_a = a;
          leaving = i;
        }
      }
    }
    if (leaving < 0) {
      if (tiny_column) {
        // Every positive entry sits below the stable-pivot floor: treat the
        // column as nonpositive rather than divide by noise. The periodic
        // refresh restores its true reduced cost later.
        reduced[entering] = 0.0;
        continue;
      }
      return CoreStatus::unbounded;
    }

    t.pivot(leaving, entering);
    const double f = reduced[entering];
    if (f != 0.0) {
      for (int j = 0; j < t.cols; ++j) reduced[j] -= f * t.rows[leaving][j];
      reduced[entering] = 0.0;
    }
    if (++pivots_since_refresh >= kReducedRefreshInterval) {
      refresh_reduced();
      pivots_since_refresh = 0;
    }

    const double obj = objective();
    if (obj < last_obj - 1e-12) {
      last_obj = obj;
      stalled = 0;
      if (bland) bland = false;  // plateau escaped, back to Dantzig pricing
    } else if (!bland && ++stalled >= opt.stall_before_bland) {
      // Anti-cycling while the objective is stuck. Termination is preserved:
      // Bland's rule cannot cycle, so it either finishes the phase or leaves
      // the plateau, and a strictly decreasing objective visits finitely many
      // basis values.
      bland = true;
      stalled = 0;
      refresh_reduced();
      pivots_since_refresh = 0;
    }
  }
}

}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::iteration_limit: return "iteration limit reached";
  }
  return "unknown";
}

SolveResult solve(const LinearProgram& lp, const SimplexOptions& opt) {
  check_program(lp);
  const int nv = lp.num_vars();

  // Free variables are split as x = x+ - x-.
  std::vector<int> col_of(nv);
  std::vector<bool> split(nv);
  int n_struct = 0;
  for (int i = 0; i < nv; ++i) {
    col_of[i] = n_struct;
    split[i] = lp.lower_bounds[i] == -kInf;
    n_struct += split[i] ? 2 : 1;
  }

  const int n_le = static_cast<int>(lp.le_rows.size());
  const int m = n_le + static_cast<int>(lp.eq_rows.size());

  Tableau t;
  t.cols = n_struct + n_le;  // artificials appended below
  t.rows.assign(m, {});
  t.b.assign(m, 0.0);
  t.basis.assign(m, -1);

  const auto expand = [&](const LinearProgram::Row& row, std::vector<double>& out) {
    out.assign(t.cols, 0.0);
    for (int i = 0; i < nv; ++i) {
      const double c = row.coeffs[i];
      if (c == 0.0) continue;
      out[col_of[i]] += c;
      if (split[i]) out[col_of[i] + 1] -= c;
    }
  };

  std::vector<int> needs_artificial;
  for (int r = 0; r < m; ++r) {
    const bool is_le = r < n_le;
    const LinearProgram::Row& src = is_le ? lp.le_rows[r] : lp.eq_rows[r - n_le];
    expand(src, t.rows[r]);
    t.b[r] = src.rhs;
    if (is_le) t.rows[r][n_struct + r] = 1.0;
    if (t.b[r] < 0.0) {
      for (double& v : t.rows[r]) v = -v;
      t.b[r] = -t.b[r];
    }
    // A slack entering with +1 serves as the initial basic variable; negated
    // le rows and equalities need an artificial.
    if (is_le && t.rows[r][n_struct + r] == 1.0) {
      t.basis[r] = n_struct + r;
    } else {
      needs_artificial.push_back(r);
    }
  }

  const int first_artificial = t.cols;
  t.cols += static_cast<int>(needs_artificial.size());
  for (auto& row : t.rows) row.resize(t.cols, 0.0);
  for (std::size_t a = 0; a < needs_artificial.size(); ++a) {
    const int r = needs_artificial[a];
    t.rows[r][first_artificial + static_cast<int>(a)] = 1.0;
    t.basis[r] = first_artificial + static_cast<int>(a);
  }

  SolveResult result;
  long iterations = 0;

  if (!needs_artificial.empty()) {
    std::vector<double> phase1(t.cols, 0.0);
    for (int j = first_artificial; j < t.cols; ++j) phase1[j] = 1.0;
    const CoreStatus status =
        run_phase(t, phase1, t.cols, opt, iterations, opt.feasibility_tol * 0.01);
    if (status == CoreStatus::iteration_limit) {
      result.status = SolveStatus::iteration_limit;
      result.iterations = iterations;
      return result;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] >= first_artificial) infeas += t.b[i];
    }
    if (infeas > opt.feasibility_tol) {
      result.status = SolveStatus::infeasible;
      result.iterations = iterations;
      return result;
    }
    // Pivot remaining artificials out on the largest available element; a
    // row with no real coefficients left is redundant and gets dropped.
    for (int i = static_cast<int>(t.rows.size()) - 1; i >= 0; --i) {
      if (t.basis[i] < first_artificial) continue;
      t.b[i] = 0.0;
      int col = -1;
      double best = opt.pivot_tol;
      for (int j = 0; j < first_artificial; ++j) {
        if (std::abs(t.rows[i][j]) > best) {
          best = std::abs(t.rows[i][j]);
          col = j;
        }
      }
      if (col >= 0) {
        t.pivot(i, col);
      } else {
        t.rows.erase(t.rows.begin() + i);
        t.b.erase(t.b.begin() + i);
        t.basis.erase(t.basis.begin() + i);
      }
    }
  }

  std::vector<double> phase2(t.cols, 0.0);
  for (int i = 0; i < nv; ++i) {
    const double c = lp.objective[i];
    if (c == 0.0) continue;
    phase2[col_of[i]] += c;
    if (split[i]) phase2[col_of[i] + 1] -= c;
  }
  const CoreStatus status = run_phase(t, phase2, first_artificial, opt, iterations, -kInf);
  result.iterations = iterations;
  if (status == CoreStatus::iteration_limit) {
    result.status = SolveStatus::iteration_limit;
    return result;
  }
  if (status == CoreStatus::unbounded) {
    result.status = SolveStatus::unbounded;
    return result;
  }

  std::vector<double> x_std(t.cols, 0.0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) x_std[t.basis[i]] = t.b[i];
  result.status = SolveStatus::optimal;
  result.solution.resize(nv);
  double value = lp.objective_constant;
  for (int i = 0; i < nv; ++i) {
    double v = x_std[col_of[i]];
    if (split[i]) v -= x_std[col_of[i] + 1];
    result.solution[i] = v;
    value += lp.objective[i] * v;
  }
  result.value = value;
  return result;
}

std::string LinearProgram::dump() const {
  const auto name = [this](int i) {
    return var_names.empty() ? "x" + std::to_string(i) : var_names[i];
  };
  std::ostringstream out;
  out << "minimize";
  bool first = true;
  for (int i = 0; i < num_vars(); ++i) {
    if (objective[i] == 0.0) continue;
    out << (first ? " " : " + ") << objective[i] << "*" << name(i);
    first = false;
  }
  if (objective_constant != 0.0) out << (first ? " " : " + ") << objective_constant;
  if (first && objective_constant == 0.0) out << " 0";
  out << "\nsubject to\n";
  const auto print_row = [&](const Row& row, const char* rel, int index, const char* tag) {
    out << "  " << tag << "[" << index << "]:";
    bool lead = true;
    for (int i = 0; i < num_vars(); ++i) {
      if (row.coeffs[i] == 0.0) continue;
      out << (lead ? " " : " + ") << row.coeffs[i] << "*" << name(i);
      lead = false;
    }
    if (lead) out << " 0";
    out << " " << rel << " " << row.rhs << "\n";
  };
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    print_row(eq_rows[r], "=", static_cast<int>(r), "eq");
  }
  for (std::size_t r = 0; r < le_rows.size(); ++r) {
    print_row(le_rows[r], "<=", static_cast<int>(r), "le");
  }
  out << "bounds\n";
  for (int i = 0; i < num_vars(); ++i) {
    if (lower_bounds[i] == -kInf) {
      out << "  " << name(i) << " free\n";
    } else {
      out << "  " << name(i) << " >= 0\n";
    }
  }
  return out.str();
}

}  // namespace lpir
