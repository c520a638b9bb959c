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

#ifndef WAFFLE_PROTOCOL_HPP_
#define WAFFLE_PROTOCOL_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "waffle/state.hpp"
#include "waffle/types.hpp"

namespace waffle {

/// Result of one protocol step: the process's next local state plus messages
/// to enqueue.
struct StepEffect {
  LocalState state;
  std::vector<Send> sends;
};

/**
 * Deterministic protocol interface. All four functions must be pure: no
 * randomness, no ambient input, equal inputs give equal outputs. decided()
 * must be monotone -- once a local state reports a bit, every successor local
 * state reports the same bit (the model checks this on every applied action).
 */
class Protocol {
 public:
  virtual ~Protocol() = default;

  virtual std::string name() const = 0;
  virtual int n() const = 0;

  virtual StepEffect init(ProcessId i, Bit input) const = 0;
  virtual StepEffect on_deliver(ProcessId i, const LocalState& local,
                                const Payload& payload,
                                ProcessId sender) const = 0;
  virtual StepEffect on_null(ProcessId i, const LocalState& local) const = 0;
  virtual std::optional<Bit> decided(const LocalState& local) const = 0;
};

inline constexpr const char* kUniformVote = "uniform-vote";
inline constexpr const char* kFloodAll = "flood-all";
inline constexpr const char* kConstantDecide = "constant";

/// Builds one of the builtin protocols by CLI name. Throws Error on an
/// unknown name or a process count the protocol cannot run with.
std::shared_ptr<const Protocol> make_protocol(const std::string& name, int n);

std::vector<std::string> builtin_protocol_names();

}  // namespace waffle

#endif  // WAFFLE_PROTOCOL_HPP_
