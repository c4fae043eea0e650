// Command-line front end: tradeoff sweeps, exponent bounds, leakage audits,
// Monte Carlo cost simulation, and optimality verification.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage or guard violation,
// 3 verification or audit failure.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lpir/audit.hpp"
#include "lpir/allocation.hpp"
#include "lpir/optimizer.hpp"
#include "lpir/protocol.hpp"
#include "lpir/scheme.hpp"
#include "lpir/simplex.hpp"
#include "lpir/tradeoff.hpp"
#include "lpir/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitVerification = 3;

constexpr double kLn2 = 0.6931471805599453;

// JSON rejects infinities; render them as strings so reports stay parseable.
json render_real(double v) {
  if (std::isinf(v)) return v > 0 ? "infinity" : "-infinity";
  if (std::isnan(v)) return "nan";
  return v;
}

json make_report(const std::string& command, json params, json results,
                 std::optional<std::uint64_t> seed) {
  json report{{"command", command},
              {"params", std::move(params)},
              {"results", std::move(results)},
              {"version", LPIR_VERSION}};
  report["seed"] = seed.has_value() ? json(*seed) : json(nullptr);
  return report;
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open " << out_path << " for writing\n";
    return kExitIo;
  }
  out << text;
  if (!out.flush()) {
    std::cerr << "error: write to " << out_path << " failed\n";
    return kExitIo;
  }
  return kExitOk;
}

std::string format_csv_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::int64_t audit_guard_from_env() {
  const char* raw = std::getenv("LPIR_ENUM_GUARD");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    const long long v = std::stoll(raw);
    if (v > 0) return static_cast<std::int64_t>(v);
  } catch (const std::exception&) {
  }
  std::cerr << "warning: ignoring non-positive or malformed LPIR_ENUM_GUARD\n";
  return 0;
}

struct TradeoffArgs {
  int n = 0;
  int k = 0;
  double eps_min = 0.0;
  double eps_max = 3.0;
  int steps = 50;
  bool bits = false;
  std::string format = "csv";
  std::string out;
};

int cmd_tradeoff(const TradeoffArgs& args) {
  const double scale = args.bits ? kLn2 : 1.0;
  const double lo = args.eps_min * scale;
  const double hi = args.eps_max * scale;
  if (!(lo >= 0.0) || hi < lo) {
    std::cerr << "error: need 0 <= eps-min <= eps-max\n";
    return kExitUsage;
  }
  std::vector<double> grid(args.steps);
  for (int i = 0; i < args.steps; ++i) {
    grid[i] = args.steps == 1 ? lo : lo + i * (hi - lo) / (args.steps - 1);
  }
  const std::vector<lpir::TradeoffPoint> points = lpir::sweep(args.n, args.k, grid);

  if (args.format == "csv") {
    std::string text = "epsilon,d_tsc,d_ub,d_lb,gap_tsc_lb,gap_ub_lb\n";
    for (const auto& p : points) {
      text += format_csv_value(p.epsilon) + "," + format_csv_value(p.d_tsc) + "," +
              format_csv_value(p.d_ub) + "," + format_csv_value(p.d_lb) + "," +
              format_csv_value(p.d_tsc / p.d_lb) + "," + format_csv_value(p.d_ub / p.d_lb) +
              "\n";
    }
    return emit(text, args.out);
  }

  json rows = json::array();
  for (const auto& p : points) {
    rows.push_back(json{{"epsilon", p.epsilon},
                        {"d_tsc", p.d_tsc},
                        {"d_ub", p.d_ub},
                        {"d_lb", p.d_lb},
                        {"gap_tsc_lb", p.d_tsc / p.d_lb},
                        {"gap_ub_lb", p.d_ub / p.d_lb}});
  }
  const json report = make_report(
      "tradeoff",
      json{{"n", args.n}, {"k", args.k}, {"eps_min", lo}, {"eps_max", hi},
           {"steps", args.steps}},
      json{{"rows", std::move(rows)}}, std::nullopt);
  return emit(report.dump(2) + "\n", args.out);
}

struct ExponentArgs {
  int n = 0;
  int k = 0;
  double d = 0.0;
};

int cmd_exponent(const ExponentArgs& args) {
  const lpir::ExponentBounds b = lpir::theorem1_bounds(args.n, args.k, args.d);
  const json report = make_report(
      "exponent", json{{"n", args.n}, {"k", args.k}, {"d", args.d}},
      json{{"alpha", b.alpha},
           {"eps_tsc", b.eps_tsc},
           {"eps_ub", b.eps_ub},
           {"tsc_upper", b.tsc_upper},
           {"ub_upper", b.ub_upper},
           {"ub_lower", b.ub_lower},
           {"tsc_within_upper", b.eps_tsc <= b.tsc_upper + 1e-9},
           {"ub_within_upper", b.eps_ub <= b.ub_upper + 1e-9},
           {"ub_above_lower", b.eps_ub >= b.ub_lower - 1e-9}},
      std::nullopt);
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

struct AuditArgs {
  int n = 0;
  int k = 0;
  double eps = 0.0;
  bool bits = false;
  std::string scheme = "tsc";
};

int cmd_audit(const AuditArgs& args) {
  const lpir::SchemeParams params(args.n, args.k, args.eps * (args.bits ? kLn2 : 1.0));
  const std::int64_t guard = audit_guard_from_env();
  const std::int64_t cyclic_guard = guard > 0 ? 10 * guard : 0;

  const lpir::WeightAllocation alloc = args.scheme == "tsc"
                                           ? lpir::optimal_allocation(params)
                                           : lpir::samy_allocation(params);
  const double analytic =
      args.scheme == "tsc" ? lpir::cost_tsc(params) : lpir::cost_ub(params);
  const lpir::ValidationReport validation = lpir::validate(params, alloc);
  const lpir::FullAllocation full = lpir::expand_to_full(params, alloc);
  const lpir::LeakageReport leakage = lpir::measure_leakage(params, full, cyclic_guard);
  const double exact_cost = lpir::exact_download_cost(params, full, cyclic_guard);
  const bool correct_cyclic =
      lpir::verify_correctness(params, lpir::PermutationScope::cyclic, 0x5eed, cyclic_guard);
  const bool correct_all =
      lpir::verify_correctness(params, lpir::PermutationScope::all, 0x5eed, guard);

  const bool leakage_ok = leakage.empirical_epsilon <= params.epsilon + 1e-9;
  const bool ok = leakage_ok && correct_cyclic && correct_all;

  json validation_doc{{"normalization_ok", validation.normalization_ok},
                      {"nonneg_ok", validation.nonneg_ok},
                      {"dp_ok", validation.dp_ok},
                      {"worst_ratio_log", render_real(validation.worst_ratio_log)}};
  const json report = make_report(
      "audit",
      json{{"n", args.n}, {"k", args.k}, {"epsilon", params.epsilon},
           {"scheme", args.scheme}},
      json{{"allocation", lpir::allocation_to_json(params, alloc)},
           {"validation", std::move(validation_doc)},
           {"leakage", lpir::leakage_report_to_json(params, leakage)},
           {"leakage_within_epsilon", leakage_ok},
           {"exact_download_cost", exact_cost},
           {"analytic_cost", analytic},
           {"correctness",
            {{"cyclic", correct_cyclic}, {"all", correct_all}, {"ok", correct_cyclic && correct_all}}}},
      std::nullopt);
  std::cout << report.dump(2) << "\n";
  return ok ? kExitOk : kExitVerification;
}

struct SimulateArgs {
  int n = 0;
  int k = 0;
  double eps = 0.0;
  bool bits = false;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  int message_index = 1;
};

int cmd_simulate(const SimulateArgs& args) {
  const lpir::SchemeParams params(args.n, args.k, args.eps * (args.bits ? kLn2 : 1.0));
  if (args.message_index < 1 || args.message_index > args.k) {
    std::cerr << "error: message-index outside [1:K]\n";
    return kExitUsage;
  }
  const lpir::WeightAllocation alloc = lpir::optimal_allocation(params);
  const lpir::MonteCarloCost mc =
      lpir::monte_carlo_cost(params, alloc, args.message_index, args.trials, args.seed);
  const double analytic = lpir::cost_tsc(params);

  double z;
  if (mc.std_error > 0.0) {
    z = (mc.mean - analytic) / mc.std_error;
  } else {
    // Degenerate sample: every trial downloaded the same amount. Accept when
    // the empirical mean matches the analytic cost to fixed precision.
    z = std::abs(mc.mean - analytic) <= 1e-12 ? 0.0
                                              : std::numeric_limits<double>::infinity();
  }
  const bool within = std::abs(z) <= 4.0;

  const json report = make_report(
      "simulate",
      json{{"n", args.n}, {"k", args.k}, {"epsilon", params.epsilon},
           {"trials", args.trials}, {"message_index", args.message_index}},
      json{{"mean", mc.mean},
           {"std_error", mc.std_error},
           {"analytic_cost", analytic},
           {"z_score", render_real(z)},
           {"within_four_se", within}},
      args.seed);
  std::cout << report.dump(2) << "\n";
  return within ? kExitOk : kExitVerification;
}

struct VerifyArgs {
  int n = 0;
  int k = 0;
  double eps = 0.0;
  bool bits = false;
  bool skip_p1 = false;
};

int cmd_verify(const VerifyArgs& args) {
  const lpir::SchemeParams params(args.n, args.k, args.eps * (args.bits ? kLn2 : 1.0));

  const lpir::SolveResult reduced = lpir::solve(lpir::build_p2(params));
  if (reduced.status != lpir::SolveStatus::optimal) {
    std::cerr << "error: reduced program solve failed: " << lpir::to_string(reduced.status)
              << "\n";
    return kExitVerification;
  }
  const double closed_form = lpir::cost_tsc(params);
  const bool p2_ok = std::abs(reduced.value - closed_form) <= 1e-8;

  json p1_value = nullptr;
  json p1_matches = nullptr;
  json p1_skip_reason = nullptr;
  bool p1_skipped = true;
  bool p1_ok = true;
  if (args.skip_p1) {
    p1_skip_reason = "skipped by flag";
  } else {
    try {
      const lpir::SolveResult full = lpir::solve(lpir::build_p1(params));
      if (full.status != lpir::SolveStatus::optimal) {
        std::cerr << "error: full program solve failed: " << lpir::to_string(full.status)
                  << "\n";
        return kExitVerification;
      }
      p1_skipped = false;
      p1_value = full.value;
      p1_ok = std::abs(full.value - reduced.value) <= 1e-6;
      p1_matches = p1_ok;
    } catch (const std::domain_error& e) {
      std::cerr << "warning: skipping full program: " << e.what() << "\n";
      p1_skip_reason = e.what();
    }
  }

  const lpir::KktCertificate cert = lpir::kkt_certificate(params);
  // lambda multiplies an equality and may take any sign; only the inequality
  // multipliers must be nonnegative.
  double min_dual = 0.0;
  for (double v : cert.mu) min_dual = std::min(min_dual, v);
  for (double v : cert.alpha_dual) min_dual = std::min(min_dual, v);
  for (double v : cert.beta_dual) min_dual = std::min(min_dual, v);
  const bool kkt_ok =
      cert.max_residual <= 1e-9 && min_dual >= -1e-12 && cert.max_slackness <= 1e-12;

  const bool pass = p2_ok && p1_ok && kkt_ok;
  const json report = make_report(
      "verify",
      json{{"n", args.n}, {"k", args.k}, {"epsilon", params.epsilon},
           {"skip_p1", args.skip_p1}},
      json{{"p2_lp_value", reduced.value},
           {"closed_form_cost", closed_form},
           {"p2_matches_closed_form", p2_ok},
           {"p1_lp_value", p1_value},
           {"p1_skipped", p1_skipped},
           {"p1_skip_reason", p1_skip_reason},
           {"p1_matches_p2", p1_matches},
           {"kkt",
            {{"lambda", cert.lambda},
             {"max_residual", cert.max_residual},
             {"max_slackness", cert.max_slackness},
             {"min_dual", min_dual}}},
           {"kkt_ok", kkt_ok},
           {"pass", pass}},
      std::nullopt);
  std::cout << report.dump(2) << "\n";
  return pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leaky private information retrieval toolkit"};
  app.require_subcommand(1);

  TradeoffArgs tradeoff;
  CLI::App* tradeoff_cmd =
      app.add_subcommand("tradeoff", "Sweep the leakage/download tradeoff curves");
  tradeoff_cmd->add_option("--n", tradeoff.n, "servers")->required();
  tradeoff_cmd->add_option("--k", tradeoff.k, "messages")->required();
  tradeoff_cmd->add_option("--eps-min", tradeoff.eps_min, "grid start (nats)");
  tradeoff_cmd->add_option("--eps-max", tradeoff.eps_max, "grid end (nats)");
  tradeoff_cmd->add_option("--steps", tradeoff.steps, "grid points")
      ->check(CLI::PositiveNumber);
  tradeoff_cmd->add_flag("--bits", tradeoff.bits, "epsilon flags are in bits");
  tradeoff_cmd->add_option("--format", tradeoff.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  tradeoff_cmd->add_option("--out", tradeoff.out, "output file (default stdout)");

  ExponentArgs exponent;
  CLI::App* exponent_cmd =
      app.add_subcommand("exponent", "Leakage exponents and scaling bounds at a fixed cost");
  exponent_cmd->add_option("--n", exponent.n, "servers")->required();
  exponent_cmd->add_option("--k", exponent.k, "messages")->required();
  exponent_cmd->add_option("--d", exponent.d, "download cost")->required();

  AuditArgs audit;
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "Exhaustive leakage, cost, and correctness audit");
  audit_cmd->add_option("--n", audit.n, "servers")->required();
  audit_cmd->add_option("--k", audit.k, "messages")->required();
  audit_cmd->add_option("--eps", audit.eps, "leakage exponent (nats)")->required();
  audit_cmd->add_flag("--bits", audit.bits, "epsilon flags are in bits");
  audit_cmd->add_option("--scheme", audit.scheme, "allocation to audit")
      ->check(CLI::IsMember({"tsc", "samy"}));

  SimulateArgs simulate;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Monte Carlo estimate of the download cost");
  simulate_cmd->add_option("--n", simulate.n, "servers")->required();
  simulate_cmd->add_option("--k", simulate.k, "messages")->required();
  simulate_cmd->add_option("--eps", simulate.eps, "leakage exponent (nats)")->required();
  simulate_cmd->add_flag("--bits", simulate.bits, "epsilon flags are in bits");
  simulate_cmd->add_option("--trials", simulate.trials, "number of retrievals")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", simulate.seed, "master seed");
  simulate_cmd->add_option("--message-index", simulate.message_index, "retrieved message");

  VerifyArgs verify;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Check the optimizer against the closed forms");
  verify_cmd->add_option("--n", verify.n, "servers")->required();
  verify_cmd->add_option("--k", verify.k, "messages")->required();
  verify_cmd->add_option("--eps", verify.eps, "leakage exponent (nats)")->required();
  verify_cmd->add_flag("--bits", verify.bits, "epsilon flags are in bits");
  verify_cmd->add_flag("--skip-p1", verify.skip_p1, "skip the full program");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (tradeoff_cmd->parsed()) return cmd_tradeoff(tradeoff);
    if (exponent_cmd->parsed()) return cmd_exponent(exponent);
    if (audit_cmd->parsed()) return cmd_audit(audit);
    if (simulate_cmd->parsed()) return cmd_simulate(simulate);
    if (verify_cmd->parsed()) return cmd_verify(verify);
  } catch (const lpir::DecodeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    // invalid parameters, infeasible costs, enumeration guards
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
