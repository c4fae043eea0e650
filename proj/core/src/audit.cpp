#include "lpir/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lpir/protocol.hpp"
#include "lpir/rng.hpp"

namespace lpir {

namespace {

std::int64_t scope_entries(const SchemeParams& params, PermutationScope scope) {
  const std::int64_t keys = checked_pow(params.n_servers, params.n_messages - 1);
  const std::int64_t perms = scope == PermutationScope::cyclic
                                 ? params.n_servers
                                 : checked_factorial(params.n_servers);
  std::int64_t per_message, total;
  if (__builtin_mul_overflow(keys, perms, &per_message) ||
      __builtin_mul_overflow(per_message, static_cast<std::int64_t>(params.n_messages),
                             &total)) {
    throw std::overflow_error("audit enumeration size exceeds 64-bit range");
  }
  return total;
}

void check_audit_guard(const SchemeParams& params, PermutationScope scope,
                       std::int64_t guard_override) {
  const std::int64_t limit =
      guard_override > 0
          ? guard_override
          : (scope == PermutationScope::cyclic ? kAuditGuardCyclic : kAuditGuardAllPerms);
  const std::int64_t entries = scope_entries(params, scope);
  if (entries > limit) {
    std::ostringstream msg;
    msg << "audit enumeration needs K*N^(K-1)*|perms| = " << entries
        << " entries, above the guard of " << limit;
    throw std::length_error(msg.str());
  }
}

void check_alloc_shape(const SchemeParams& params, const FullAllocation& alloc) {
  if (alloc.n_servers != params.n_servers || alloc.n_messages != params.n_messages ||
      static_cast<int>(alloc.table.size()) != params.n_messages) {
    throw std::invalid_argument("full allocation shape does not match the scheme parameters");
  }
}

}  // namespace

QueryDistribution query_distribution(const SchemeParams& params, const FullAllocation& alloc,
                                     int message_index, int server,
                                     std::int64_t guard_override) {
  check_alloc_shape(params, alloc);
  check_audit_guard(params, alloc.scope, guard_override);
  if (message_index < 1 || message_index > params.n_messages) {
    throw std::out_of_range("message index outside [1:K]");
  }
  if (server < 1 || server > params.n_servers) {
    throw std::out_of_range("server index outside [1:N]");
  }
  const int n = params.n_servers;
  const int k = params.n_messages;

  QueryDistribution dist;
  dist.server = server;
  dist.message = message_index;
  for (const auto& [codes, mass] : alloc.table[message_index - 1]) {
    const std::vector<int> f = decode_base_n(codes.first, k - 1, n);
    const std::vector<int> pi = decode_base_n(codes.second, n, n);
    int sigma = 0;
    for (int e : f) sigma += e;
    const int retrieval = ((pi[server - 1] - sigma) % n + n) % n;
    // Query code without materializing the vector: splice the retrieval
    // index into the base-N expansion at coordinate message_index.
    std::uint64_t code = 0;
    int next_key_entry = 0;
    for (int m = 1; m <= k; ++m) {
      const int digit = (m == message_index) ? retrieval : f[next_key_entry++];
      code = code * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(digit);
    }
    dist.probs[code] += mass;
  }
  return dist;
}

LeakageReport measure_leakage(const SchemeParams& params, const FullAllocation& alloc,
                              std::int64_t guard_override) {
  check_alloc_shape(params, alloc);
  check_audit_guard(params, alloc.scope, guard_override);
  const int n = params.n_servers;
  const int k = params.n_messages;
  const double inf = std::numeric_limits<double>::infinity();

  LeakageReport report;
  report.per_server_eps.assign(n, 0.0);
  for (int server = 1; server <= n; ++server) {
    std::vector<QueryDistribution> dists;
    dists.reserve(k);
    for (int m = 1; m <= k; ++m) {
      dists.push_back(query_distribution(params, alloc, m, server, guard_override));
    }
    double server_worst = 0.0;
    for (int k1 = 1; k1 <= k; ++k1) {
      for (int k2 = 1; k2 <= k; ++k2) {
        if (k1 == k2) continue;
        for (const auto& [code, p1] : dists[k1 - 1].probs) {
          if (p1 <= 0.0) continue;
          const auto it = dists[k2 - 1].probs.find(code);
          const double p2 = it == dists[k2 - 1].probs.end() ? 0.0 : it->second;
          const double ratio = p2 <= 0.0 ? inf : std::log(p1 / p2);
          if (ratio > server_worst) server_worst = ratio;
          if (ratio > report.empirical_epsilon ||
              (report.witness.server == 0 && ratio >= report.empirical_epsilon)) {
            report.empirical_epsilon = ratio;
            report.witness = LeakageWitness{server, code, k1, k2};
          }
        }
      }
    }
    report.per_server_eps[server - 1] = server_worst;
  }
  return report;
}

double exact_download_cost(const SchemeParams& params, const FullAllocation& alloc,
                           std::int64_t guard_override) {
  check_alloc_shape(params, alloc);
  check_audit_guard(params, alloc.scope, guard_override);
  const double full_rate = params.n_servers / (params.n_servers - 1.0);
  double worst = 0.0;
  for (int m = 0; m < params.n_messages; ++m) {
    double direct = 0.0;  // mass of the all-zero key: N-1 downloaded symbols
    for (const auto& [codes, mass] : alloc.table[m]) {
      if (codes.first == 0) direct += mass;
    }
    const double cost = direct + full_rate * (1.0 - direct);
    if (cost > worst) worst = cost;
  }
  return worst;
}

MonteCarloCost monte_carlo_cost(const SchemeParams& params, const WeightAllocation& alloc,
                                int message_index, std::int64_t trials, std::uint64_t seed) {
  if (trials <= 0) throw std::invalid_argument("trials must be > 0");
  const MessageStore store = MessageStore::random(params, SplitMix64::derive(seed, 0));
  const std::span<const std::uint8_t> expected = store.message(message_index);

  // Downloads take only the values N-1 (zero key) and N, so integer counts
  // determine the mean and variance exactly and deterministically.
  std::int64_t direct_trials = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    SplitMix64 rng(SplitMix64::derive(seed, static_cast<std::uint64_t>(t) + 1));
    const RetrievalTranscript transcript =
        run_retrieval(params, alloc, message_index, store, rng);
    if (transcript.downloaded_symbols == params.n_servers - 1) ++direct_trials;
    if (!std::equal(transcript.decoded.begin(), transcript.decoded.end(), expected.begin(),
                    expected.end())) {
      throw std::logic_error("simulated retrieval decoded the wrong message");
    }
  }

  const double per_symbol_direct = 1.0;
  const double per_symbol_full = params.n_servers / (params.n_servers - 1.0);
  const std::int64_t full_trials = trials - direct_trials;
  MonteCarloCost result{};
  result.mean =
      (direct_trials * per_symbol_direct + full_trials * per_symbol_full) / trials;
  if (trials > 1) {
    const double dd = per_symbol_direct - result.mean;
    const double df = per_symbol_full - result.mean;
    const double variance = (direct_trials * dd * dd + full_trials * df * df) / (trials - 1);
    result.std_error = std::sqrt(variance / trials);
  }
  return result;
}

bool verify_correctness(const SchemeParams& params, PermutationScope scope,
                        std::uint64_t store_seed, std::int64_t guard_override) {
  check_audit_guard(params, scope, guard_override);
  const MessageStore store = MessageStore::random(params, store_seed);
  const std::vector<KeyVector> keys = enumerate_keys(params);
  const std::vector<Permutation> perms =
      enumerate_permutations(params, scope == PermutationScope::cyclic,
                             checked_factorial(params.n_servers));
  for (int m = 1; m <= params.n_messages; ++m) {
    const std::span<const std::uint8_t> expected = store.message(m);
    for (const KeyVector& f : keys) {
      for (const Permutation& pi : perms) {
        const RandomKey key{f, pi};
        const std::vector<QueryVector> queries = make_queries(params, m, key);
        std::vector<Answer> answers;
        answers.reserve(queries.size());
        for (const QueryVector& q : queries) answers.push_back(answer_query(params, q, store));
        std::vector<std::uint8_t> decoded;
        try {
          decoded = decode(params, m, key, answers);
        } catch (const DecodeError&) {
          return false;
        }
        if (!std::equal(decoded.begin(), decoded.end(), expected.begin(), expected.end())) {
          return false;
        }
      }
    }
  }
  return true;
}

nlohmann::json leakage_report_to_json(const SchemeParams& params, const LeakageReport& report) {
  const auto render_eps = [](double eps) -> nlohmann::json {
    if (std::isinf(eps)) return "infinity";
    return eps;
  };
  nlohmann::json per_server = nlohmann::json::array();
  for (double eps : report.per_server_eps) per_server.push_back(render_eps(eps));
  const std::vector<int> witness_query =
      decode_base_n(report.witness.query_code, params.n_messages, params.n_servers);
  return nlohmann::json{
      {"empirical_epsilon", render_eps(report.empirical_epsilon)},
      {"witness",
       {{"server", report.witness.server},
        {"query", format_digits(witness_query)},
        {"k1", report.witness.k1},
        {"k2", report.witness.k2}}},
      {"per_server_epsilon", per_server}};
}

}  // namespace lpir
