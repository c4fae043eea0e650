#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lpir/allocation.hpp"
#include "lpir/rng.hpp"
#include "lpir/scheme.hpp"

namespace lpir {

/// K messages of N-1 symbols each, one byte per symbol. Symbol index 0 of
/// every message is an implicit zero dummy; real symbols sit at [1:N-1].
class MessageStore {
 public:
  /// Wraps K * (N-1) bytes laid out row-major by message.
  static MessageStore from_bytes(const SchemeParams& params, std::span<const std::uint8_t> bytes);

  /// Deterministic pseudorandom contents from a seed.
  static MessageStore random(const SchemeParams& params, std::uint64_t seed);

  int n_messages() const { return n_messages_; }
  int message_length() const { return length_; }

  /// W_k[i] for message k in [1:K] and symbol index i in [0:N-1]; index 0
  /// returns the zero dummy.
  std::uint8_t symbol(int message_index, int symbol_index) const;

  /// The N-1 real symbols of message k.
  std::span<const std::uint8_t> message(int message_index) const;

 private:
  MessageStore(int k, int length, std::vector<std::uint8_t> symbols);

  int n_messages_;
  int length_;
  std::vector<std::uint8_t> symbols_;
};

/// Client randomness of one retrieval: a key vector and a server relabeling.
struct RandomKey {
  KeyVector f;
  Permutation pi;
};

/// One server's answer: empty for the all-zero query, one symbol otherwise.
struct Answer {
  std::optional<std::uint8_t> payload;

  bool empty() const { return !payload.has_value(); }
  int length() const { return payload.has_value() ? 1 : 0; }
};

/// Everything observable about one retrieval run.
struct RetrievalTranscript {
  int message_index = 0;
  RandomKey key;
  std::vector<QueryVector> queries;   ///< one per server, index n-1
  std::vector<Answer> answers;        ///< one per server, index n-1
  std::vector<std::uint8_t> decoded;  ///< N-1 recovered symbols
  int downloaded_symbols = 0;         ///< N-1 when the key is zero, N otherwise
};

/// Raised when a set of answers is inconsistent with the retrieval key.
struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Draws (f, pi) from the weight allocation: weight class j with probability
/// N * s_j * p_j, a uniform key inside the class, and a uniform cyclic
/// permutation. The resulting distribution over pairs matches
/// expand_to_full(alloc) for every message index.
RandomKey sample_key(const SchemeParams& params, const WeightAllocation& alloc,
                     int message_index, SplitMix64& rng);

/// Queries for retrieving message k: server n receives the key vector with
/// (pi(n) - sum(f)) mod N inserted at coordinate k.
std::vector<QueryVector> make_queries(const SchemeParams& params, int message_index,
                                      const RandomKey& key);

/// Server side: XOR of W_m[q_m] over all messages, empty iff q is all-zero.
Answer answer_query(const SchemeParams& params, const QueryVector& query,
                    const MessageStore& store);

/// Client side: cancels the interference symbol and reorders the answers into
/// the N-1 symbols of message k. Throws DecodeError when an answer's
/// emptiness contradicts the key (only the server assigned retrieval index 0
/// may answer empty, and only for a zero key).
std::vector<std::uint8_t> decode(const SchemeParams& params, int message_index,
                                 const RandomKey& key, std::span<const Answer> answers);

/// Full round trip: sample a key, build queries, answer them against the
/// store, and decode.
RetrievalTranscript run_retrieval(const SchemeParams& params, const WeightAllocation& alloc,
                                  int message_index, const MessageStore& store,
                                  SplitMix64& rng);

/// Transcript serialization for inspection and audit tooling.
nlohmann::json transcript_to_json(const RetrievalTranscript& transcript);

}  // namespace lpir
