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

#ifndef WAFFLE_PROTOCOLS_HPP_
#define WAFFLE_PROTOCOLS_HPP_

#include "waffle/protocol.hpp"

namespace waffle {

/**
 * Round-structured quorum voting, the adversary's victim.
 *
 * Each round has two phases. In the vote phase a process broadcasts
 * (round, value) and waits until it holds n-1 values for the round counting
 * its own; if they are unanimous the round's proposal is that value,
 * otherwise "none". In the proposal phase it broadcasts the proposal and
 * again collects n-1 proposals counting its own: if all are the same real
 * value it decides that value; otherwise it adopts the unique real value
 * present, or 0 when it saw none (ties and no-information both fall to 0),
 * and enters the next round's vote phase.
 *
 * On deciding, a process broadcasts its decision once; any process receiving
 * a decision adopts it immediately. Decided processes consume further
 * messages without effect, so the decision stays available in-channel for
 * laggards until they read it.
 */
class UniformVote final : public Protocol {
 public:
  explicit UniformVote(int n);

  std::string name() const override { return kUniformVote; }
  int n() const override { return n_; }
  StepEffect init(ProcessId i, Bit input) const override;
  StepEffect on_deliver(ProcessId i, const LocalState& local,
                        const Payload& payload, ProcessId sender) const override;
  StepEffect on_null(ProcessId i, const LocalState& local) const override;
  std::optional<Bit> decided(const LocalState& local) const override;

  // Payload tags; payload.a = round, payload.b = value (-1 encodes "none"
  // proposals).
  static constexpr int32_t kTagVote = 1;
  static constexpr int32_t kTagProposal = 2;
  static constexpr int32_t kTagDecided = 3;

  // Decoded view of a local state, for display and tests.
  struct View {
    std::optional<Bit> decided;
    Bit value = 0;
    int round = 0;
    int phase = 0;  // 0 collecting votes, 1 collecting proposals
    int pending = 0;
  };
  static View view(const LocalState& local);

 private:
  int n_;
};

/**
 * Wait-for-all flooding: a process broadcasts its input on its first step
 * and decides the minimum after collecting all n-1 other inputs. Terminates
 * on every failure-free fair execution but blocks when one process stops
 * before broadcasting -- the blocking example.
 */
class FloodAll final : public Protocol {
 public:
  explicit FloodAll(int n);

  std::string name() const override { return kFloodAll; }
  int n() const override { return n_; }
  StepEffect init(ProcessId i, Bit input) const override;
  StepEffect on_deliver(ProcessId i, const LocalState& local,
                        const Payload& payload, ProcessId sender) const override;
  StepEffect on_null(ProcessId i, const LocalState& local) const override;
  std::optional<Bit> decided(const LocalState& local) const override;

  static constexpr int32_t kTagInput = 1;

 private:
  int n_;
};

/// Decides its own input at initialization and never communicates. Violates
/// agreement on any mixed input vector; the negative control for the
/// agreement checker.
class ConstantDecide final : public Protocol {
 public:
  explicit ConstantDecide(int n);

  std::string name() const override { return kConstantDecide; }
  int n() const override { return n_; }
  StepEffect init(ProcessId i, Bit input) const override;
  StepEffect on_deliver(ProcessId i, const LocalState& local,
                        const Payload& payload, ProcessId sender) const override;
  StepEffect on_null(ProcessId i, const LocalState& local) const override;
  std::optional<Bit> decided(const LocalState& local) const override;

 private:
  int n_;
};

}  // namespace waffle

#endif  // WAFFLE_PROTOCOLS_HPP_
