#include "lpir/protocol.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lpir {

namespace {

void check_message_index(const SchemeParams& params, int message_index) {
  if (message_index < 1 || message_index > params.n_messages) {
    throw std::out_of_range("message index outside [1:K]");
  }
}

void check_key_shape(const SchemeParams& params, const RandomKey& key) {
  if (static_cast<int>(key.f.entries.size()) != params.n_messages - 1) {
    throw std::invalid_argument("key vector must have K-1 entries");
  }
  if (static_cast<int>(key.pi.mapping.size()) != params.n_servers) {
    throw std::invalid_argument("permutation must have N entries");
  }
}

void check_store_shape(const SchemeParams& params, const MessageStore& store) {
  if (store.n_messages() != params.n_messages ||
      store.message_length() != params.n_servers - 1) {
    throw std::invalid_argument("message store shape does not match the scheme parameters");
  }
}

}  // namespace

MessageStore::MessageStore(int k, int length, std::vector<std::uint8_t> symbols)
    : n_messages_(k), length_(length), symbols_(std::move(symbols)) {}

MessageStore MessageStore::from_bytes(const SchemeParams& params,
                                      std::span<const std::uint8_t> bytes) {
  const std::size_t expected =
      static_cast<std::size_t>(params.n_messages) * (params.n_servers - 1);
  if (bytes.size() != expected) {
    std::ostringstream msg;
    msg << "store needs exactly K*(N-1) = " << expected << " bytes, got " << bytes.size();
    throw std::invalid_argument(msg.str());
  }
  return MessageStore(params.n_messages, params.n_servers - 1,
                      std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
}

MessageStore MessageStore::random(const SchemeParams& params, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::uint8_t> bytes(
      static_cast<std::size_t>(params.n_messages) * (params.n_servers - 1));
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.next_u64() & 0xff);
  return MessageStore(params.n_messages, params.n_servers - 1, std::move(bytes));
}

std::uint8_t MessageStore::symbol(int message_index, int symbol_index) const {
  if (message_index < 1 || message_index > n_messages_) {
    throw std::out_of_range("message index outside [1:K]");
  }
  if (symbol_index < 0 || symbol_index > length_) {
    throw std::out_of_range("symbol index outside [0:N-1]");
  }
  if (symbol_index == 0) return 0;  // implicit zero dummy
  return symbols_[static_cast<std::size_t>(message_index - 1) * length_ + symbol_index - 1];
}

std::span<const std::uint8_t> MessageStore::message(int message_index) const {
  if (message_index < 1 || message_index > n_messages_) {
    throw std::out_of_range("message index outside [1:K]");
  }
  return {symbols_.data() + static_cast<std::size_t>(message_index - 1) * length_,
          static_cast<std::size_t>(length_)};
}

RandomKey sample_key(const SchemeParams& params, const WeightAllocation& alloc,
                     int message_index, SplitMix64& rng) {
  check_message_index(params, message_index);
  if (static_cast<int>(alloc.probs.size()) != params.n_messages) {
    throw std::invalid_argument("allocation must carry exactly K class probabilities");
  }
  const int n = params.n_servers;
  const int len = params.n_messages - 1;

  // Weight class j carries total mass N * s_j * p_j.
  const double u = rng.next_double();
  int weight = len;
  double acc = 0.0;
  for (int j = 0; j <= len; ++j) {
    acc += n * static_cast<double>(key_class_size(params, j)) * alloc.probs[j];
    if (u < acc) {
      weight = j;
      break;
    }
  }

  // Uniform key inside the class: unrank a combination for the nonzero
  // positions, then draw each nonzero value uniformly from [1:N-1].
  std::vector<int> entries(len, 0);
  std::int64_t rank = static_cast<std::int64_t>(
      rng.next_below(static_cast<std::uint64_t>(checked_binomial(len, weight))));
  int remaining = weight;
  for (int pos = 0; pos < len && remaining > 0; ++pos) {
    const std::int64_t with_here = checked_binomial(len - pos - 1, remaining - 1);
    if (rank < with_here) {
      entries[pos] = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
      --remaining;
    } else {
      rank -= with_here;
    }
  }

  // Uniform cyclic permutation, identified by pi(1).
  const int start = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
  std::vector<int> mapping(n);
  for (int i = 0; i < n; ++i) mapping[i] = (start + i) % n;

  RandomKey key;
  key.f = make_key_vector(std::move(entries), n);
  key.pi = make_permutation(std::move(mapping));
  return key;
}

std::vector<QueryVector> make_queries(const SchemeParams& params, int message_index,
                                      const RandomKey& key) {
  check_message_index(params, message_index);
  check_key_shape(params, key);
  const int n = params.n_servers;
  const int k = params.n_messages;

  const int sigma =
      std::accumulate(key.f.entries.begin(), key.f.entries.end(), 0) % n;

  std::vector<QueryVector> queries;
  queries.reserve(n);
  for (int server = 1; server <= n; ++server) {
    const int retrieval = ((key.pi.mapping[server - 1] - sigma) % n + n) % n;
    std::vector<int> entries;
    entries.reserve(k);
    entries.insert(entries.end(), key.f.entries.begin(),
                   key.f.entries.begin() + (message_index - 1));
    entries.push_back(retrieval);
    entries.insert(entries.end(), key.f.entries.begin() + (message_index - 1),
                   key.f.entries.end());
    queries.push_back(make_query_vector(std::move(entries), n));
  }
  return queries;
}

Answer answer_query(const SchemeParams& params, const QueryVector& query,
                    const MessageStore& store) {
  check_store_shape(params, store);
  if (static_cast<int>(query.entries.size()) != params.n_messages) {
    throw std::invalid_argument("query must have K entries");
  }
  if (query.weight == 0) return Answer{};
  std::uint8_t acc = 0;
  for (int m = 1; m <= params.n_messages; ++m) {
    acc ^= store.symbol(m, query.entries[m - 1]);
  }
  return Answer{acc};
}

std::vector<std::uint8_t> decode(const SchemeParams& params, int message_index,
                                 const RandomKey& key, std::span<const Answer> answers) {
  check_message_index(params, message_index);
  check_key_shape(params, key);
  const int n = params.n_servers;
  if (static_cast<int>(answers.size()) != n) {
    throw std::invalid_argument("decode needs exactly N answers");
  }

  const int sigma =
      std::accumulate(key.f.entries.begin(), key.f.entries.end(), 0) % n;
  // Server n's answer carries retrieval index (pi(n) - sigma) mod N; the
  // server holding index 0 supplies the interference symbol.
  std::vector<int> server_of_index(n, -1);
  for (int server = 1; server <= n; ++server) {
    const int idx = ((key.pi.mapping[server - 1] - sigma) % n + n) % n;
    server_of_index[idx] = server;
  }

  const bool zero_key = key.f.weight == 0;
  const int interference_server = server_of_index[0];
  const Answer& base = answers[interference_server - 1];
  if (base.empty() != zero_key) {
    std::ostringstream msg;
    msg << "server " << interference_server << " holds retrieval index 0 and must answer "
        << (zero_key ? "empty for a zero key" : "the interference symbol");
    throw DecodeError(msg.str());
  }
  const std::uint8_t interference = zero_key ? 0 : *base.payload;

  std::vector<std::uint8_t> out(n - 1);
  for (int idx = 1; idx < n; ++idx) {
    const int server = server_of_index[idx];
    const Answer& a = answers[server - 1];
    if (a.empty()) {
      std::ostringstream msg;
      msg << "server " << server << " holds retrieval index " << idx
          << " and must not answer empty";
      throw DecodeError(msg.str());
    }
    out[idx - 1] = static_cast<std::uint8_t>(*a.payload ^ interference);
  }
  return out;
}

RetrievalTranscript run_retrieval(const SchemeParams& params, const WeightAllocation& alloc,
                                  int message_index, const MessageStore& store,
                                  SplitMix64& rng) {
  check_store_shape(params, store);
  RetrievalTranscript transcript;
  transcript.message_index = message_index;
  transcript.key = sample_key(params, alloc, message_index, rng);
  transcript.queries = make_queries(params, message_index, transcript.key);
  transcript.answers.reserve(params.n_servers);
  int downloaded = 0;
  for (const QueryVector& q : transcript.queries) {
    transcript.answers.push_back(answer_query(params, q, store));
    downloaded += transcript.answers.back().length();
  }
  transcript.downloaded_symbols = downloaded;
  transcript.decoded = decode(params, message_index, transcript.key, transcript.answers);
  return transcript;
}

nlohmann::json transcript_to_json(const RetrievalTranscript& transcript) {
  nlohmann::json answers = nlohmann::json::array();
  for (const Answer& a : transcript.answers) {
    if (a.empty()) {
      answers.push_back(nullptr);
    } else {
      answers.push_back(*a.payload);
    }
  }
  nlohmann::json queries = nlohmann::json::array();
  for (const QueryVector& q : transcript.queries) queries.push_back(q.entries);
  return nlohmann::json{{"message_index", transcript.message_index},
                        {"key", {{"f", transcript.key.f.entries},
                                 {"pi", transcript.key.pi.mapping}}},
                        {"queries", queries},
                        {"answers", answers},
                        {"decoded", transcript.decoded},
                        {"downloaded_symbols", transcript.downloaded_symbols}};
}

}  // namespace lpir
