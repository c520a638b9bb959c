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

#ifndef WAFFLE_TYPES_HPP_
#define WAFFLE_TYPES_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace waffle {

/// Binary decision value, 0 or 1.
using Bit = int;

/// 1-based process index.
using ProcessId = int;

struct SystemConfig {
  int n = 0;            // process count, > 1 for all adversary constructions
  int t = 1;            // failure tolerance; fixed to 1 throughout
  std::string protocol; // protocol identifier

  bool operator==(const SystemConfig&) const = default;
};

/// Opaque message payload. Protocols interpret (tag, a, b) themselves; the
/// model only needs equality and a total order.
struct Payload {
  int32_t tag = 0;
  int32_t a = 0;
  int32_t b = 0;

  auto operator<=>(const Payload&) const = default;
};

/// One outgoing message produced by a protocol step.
struct Send {
  ProcessId to = 0;
  Payload payload;
};

enum class ActionKind : uint8_t { Deliver = 0, Null = 1 };

/**
 * A scheduler choice. Deliver pops the head of channel (sender -> process)
 * and hands it to `process`; Null lets `process` take a step with no message.
 * An action is identified by (process, kind, sender), never by message
 * identity, so replaying it from another state re-resolves the channel head.
 *
 * Field order gives the canonical total order: ascending acting process,
 * Deliver before Null, ascending sender.
 */
struct Action {
  ProcessId process = 0;             // the acting process (receiver for Deliver)
  ActionKind kind = ActionKind::Null;
  ProcessId sender = 0;              // 0 unless kind == Deliver

  static Action deliver(ProcessId receiver, ProcessId from) {
    return Action{receiver, ActionKind::Deliver, from};
  }
  static Action null_step(ProcessId p) {
    return Action{p, ActionKind::Null, 0};
  }

  auto operator<=>(const Action&) const = default;
};

std::string to_string(const Action& a);

/// Parses the textual form produced by to_string ("d:r:s" or "n:p").
/// Returns nullopt on malformed input.
std::optional<Action> parse_action(const std::string& text);

using Schedule = std::vector<Action>;

std::string to_string(const Schedule& sched);
std::optional<Schedule> parse_schedule(const std::string& text);

/// Subset of {1..n}, kept as a bitmask.
struct ProcessSet {
  int n = 0;
  uint32_t bits = 0;

  static ProcessSet all(int n);
  /// The co-singleton Q_i = {1..n} \ {i}.
  static ProcessSet without(int n, ProcessId i);

  bool contains(ProcessId p) const {
    return p >= 1 && p <= n && (bits >> (p - 1)) & 1u;
  }
  void insert(ProcessId p);
  int size() const;
  bool subset_of(const ProcessSet& other) const;
  std::vector<ProcessId> ids() const;

  bool operator==(const ProcessSet&) const = default;
};

/// Set of process ids appearing in a schedule's actions (acting processes
/// only; a Deliver's sender does not act).
ProcessSet participants(const Schedule& sched, int n);

/// Per-process initial inputs, index p-1.
using InitVector = std::vector<Bit>;

/// The canonical ladder s_j: 1 for all indices <= j, 0 above.
InitVector ladder_vector(int n, int j);

std::string to_string(const InitVector& iv);
std::optional<InitVector> parse_init_vector(const std::string& text);

// ---------------------------------------------------------------------------
// Errors. Model-invariant breaks are exceptions; expected search outcomes
// (budget exhaustion, certified blocking) are values, not exceptions.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Deliver on an empty channel: a scheduler bug.
struct DisabledActionError : Error {
  DisabledActionError(const Action& a, size_t index);
  Action action;
  size_t index; // position within the schedule being run
};

/// A replayed schedule hit a disabled action: the two states differ visibly
/// to a participant.
struct ReplayError : Error {
  ReplayError(size_t index);
  size_t index;
};

/// Disjoint schedules reached different states in the two orders. Must never
/// occur; indicates the model itself is broken.
struct CommutationError : Error {
  using Error::Error;
};

/// Schedules handed to commute_join share a participant.
struct NotDisjointError : Error {
  using Error::Error;
};

struct ArityError : Error {
  using Error::Error;
};

struct OutOfRangeError : Error {
  using Error::Error;
};

/// A process changed or dropped its decision between two states.
struct StabilityError : Error {
  using Error::Error;
};

/// Uniform initialization failed to decide its own value.
struct NotResponsiveError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct MalformedTraceError : Error {
  using Error::Error;
};

/// A search the adversary depends on ran out of budget (or certified that no
/// decision exists where one was required).
struct OracleExhaustedError : Error {
  OracleExhaustedError(const std::string& what, size_t round);
  size_t round; // adversary round in which the search failed, 0 otherwise
};

/// The budget-bounded agreement gate found a violation before an attack.
struct AgreementGateError : Error {
  using Error::Error;
};

}  // namespace waffle

#endif  // WAFFLE_TYPES_HPP_
