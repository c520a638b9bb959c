/*
 * Copyright (c) 2026, the waffle authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef WAFFLE_STATE_HPP_
#define WAFFLE_STATE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "waffle/types.hpp"

namespace waffle {

/// Protocol-local state as a flat canonical word vector. Protocols pack and
/// unpack their own layout; the model only needs structural equality and a
/// stable byte serialization for digesting.
struct LocalState {
  std::vector<int32_t> words;

  auto operator<=>(const LocalState&) const = default;
};

/**
 * Snapshot of the whole system: every process-local state plus every directed
 * FIFO channel. Two states are equal iff all locals and all channel queues
 * are equal; the digest agrees with that equality.
 */
struct GlobalState {
  SystemConfig config;
  std::vector<LocalState> locals;              // index p-1, exactly n entries
  std::vector<std::vector<Payload>> channels;  // index (s-1)*n + (r-1)

  int n() const { return config.n; }

  const LocalState& local(ProcessId p) const { return locals[p - 1]; }
  LocalState& local(ProcessId p) { return locals[p - 1]; }

  const std::vector<Payload>& channel(ProcessId sender, ProcessId receiver) const {
    return channels[(sender - 1) * config.n + (receiver - 1)];
  }
  std::vector<Payload>& channel(ProcessId sender, ProcessId receiver) {
    return channels[(sender - 1) * config.n + (receiver - 1)];
  }

  /// Total messages in flight.
  size_t messages_in_flight() const;

  bool operator==(const GlobalState& other) const {
    return config == other.config && locals == other.locals &&
           channels == other.channels;
  }
};

// Digest algorithm identifier, recorded in trace headers so files are
// self-describing.
inline constexpr const char* kDigestAlgo = "fnv1a64";
inline constexpr int kDigestVersion = 1;

/// Stable 64-bit FNV-1a digest over the canonical serialization. Equal states
/// always digest equal; searches never rely on the converse (deduplication
/// confirms candidates with full structural equality).
uint64_t state_digest(const GlobalState& s);

std::string digest_hex(uint64_t d);

struct StateHash {
  size_t operator()(const GlobalState& s) const {
    return static_cast<size_t>(state_digest(s));
  }
};

}  // namespace waffle

#endif  // WAFFLE_STATE_HPP_
