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

#ifndef WAFFLE_ADVERSARY_HPP_
#define WAFFLE_ADVERSARY_HPP_

#include <memory>

#include "waffle/oracle.hpp"

namespace waffle::adversary {

using oracle::Fork;
using oracle::SearchBudget;

/// How the 0-deciding branch of the bivalent initialization was obtained.
enum class ZeroRoute {
  DirectWitness,   // some witness at the pivot already decided 0
  Replay,          // the previous rung's 0-witness replayed at the pivot
  CertifySearch,   // fallback: unrestricted bivalence search at the pivot
};

/**
 * A certified bivalent initial state: the pivot ladder state s_k together
 * with the least ladder index k whose witnesses first decide 1, a fork
 * proving both values reachable, and the replay of the previous rung's
 * 0-witness (the construction's own evidence, validated independently).
 */
struct BivalentInit {
  GlobalState state;  // b_0 = s_k
  int k = 0;
  Fork fork;
  std::optional<Execution> zero_replay;
  bool replay_decides_zero = false;
  ZeroRoute route = ZeroRoute::DirectWitness;
};

/**
 * Walks the initialization ladder s_0, s_1, ..., s_n evaluating the witness
 * for every co-singleton subset at each rung, systematically increasing the
 * rung after trying all subsets; stops at the least k with a 1-deciding
 * witness and certifies a fork at s_k. Requires n > 1 and a protocol whose
 * uniform initializations are responsive (checked first).
 */
BivalentInit find_bivalent_init(const Protocol& p, const SearchBudget& budget);

/// One-step extension output: a reachable extension b' of b that is bivalent
/// via Q_i, the certifying full i-fork at b', and the path taken from b to b'.
struct ExtendResult {
  GlobalState state;
  Fork fork;
  Schedule extension;
};

/// Audit record for one position of the backward walk.
struct ProgramLogStep {
  int position = 0;           // index of S in the walked branch's states
  uint64_t s_digest = 0;
  uint64_t s_prime_digest = 0;
  Action step_action;         // the action S -> S'
  Schedule path;              // maintained Q_i path from S' (decides walk value)
  Bit wt_value = 0;           // decision of the witness at S
  bool advanced = false;      // walk moved past this position
};

struct ProgramLog {
  ProcessId i = 0;
  Bit walk_value = 1;         // value decided by the walked branch
  Execution walked;
  std::vector<ProgramLogStep> steps;
  int exit_position = -1;
  int exit_case = 0;          // 0: stop at S (non-i step); 1: stop at S' (i step)
  bool trivial = false;       // b was already bivalent via Q_i; no walk ran
};

/**
 * The backward-walk construction. If b is already bivalent via Q_i the
 * trivial case fires and b' = b with a freshly certified full i-fork.
 * Otherwise, starting from the deciding end of the fork's branch opposing
 * the witness value at b, the walk moves toward b keeping a Q_i path to that
 * branch's value, querying the witness at every state, and stops at the
 * first state whose witness flips -- resolving an i step by commuting the
 * witness path past it. The result is a full i-fork. `allow_trivial` exists
 * so audits can force the walk to run.
 */
ExtendResult one_step_extend_program(const Protocol& p, const GlobalState& b,
                                     const Fork& fork, ProcessId i,
                                     const SearchBudget& budget,
                                     ProgramLog* log = nullptr,
                                     bool allow_trivial = true);

struct ForkModifyOutcome {
  bool full = false;  // case 1: full i-fork at a new origin
  Fork fork;
  Schedule hop;       // old origin -> new origin actions (case 1 only)
};

/**
 * Fork modification. Given an i-fork with i_len = m > 0, locates the last
 * i action on alpha and queries the witness just before it. If the witness
 * value matches beta, commutes it past the i action into a full i-fork at
 * the successor state (case 1); if it matches alpha, splices it into alpha
 * for an i-fork with i_len < m at the same origin (case 2).
 */
ForkModifyOutcome fork_modify(const Protocol& p, const Fork& phi, ProcessId i,
                              const SearchBudget& budget);

/// The condensed construction: seed an i-fork from the witness at b, then
/// apply fork_modify until full. The trivial already-bivalent-via-Q_i case
/// short-circuits exactly as in the walk construction.
ExtendResult one_step_extend_fork(const Protocol& p, const GlobalState& b,
                                  const Fork& fork, ProcessId i,
                                  const SearchBudget& budget,
                                  bool allow_trivial = true);

enum class Variant { Program, ForkChain };

std::string to_string(Variant v);
std::optional<Variant> parse_variant(const std::string& text);

/// How the certificate for the state after a turn was re-derived.
enum class ForkMode {
  Commuted,     // existing full i-fork replayed past the applied action
  Recertified,  // fallback witness-based re-certification
  Served,       // turn satisfied inside the extension; fork carried over
};

std::string to_string(ForkMode m);

struct TurnRecord {
  size_t index = 0;
  ProcessId turn = 0;
  Schedule extension;
  std::optional<Action> applied;
  uint64_t digest_after = 0;
  ForkMode mode = ForkMode::Commuted;
};

/**
 * The round-robin generator of an unbounded indecisive execution. Starting
 * from the bivalent initialization, each turn extends the current state to
 * one bivalent via the turn process, applies that process's canonical least
 * enabled action unless the extension already contained one, and re-derives
 * the certificate for the successor. Lazy and deterministic: turn k is
 * reproducible and needs no lookahead. Single sequential state machine; not
 * safe for concurrent stepping.
 */
class IndecisiveExecution {
 public:
  IndecisiveExecution(std::shared_ptr<const Protocol> protocol,
                      const SearchBudget& budget, Variant variant,
                      bool run_gates = true);

  const BivalentInit& init_info() const { return binit_; }
  const GlobalState& start_state() const { return binit_.state; }
  Variant variant() const { return variant_; }

  /// Generates turns up to k as needed; throws OracleExhaustedError with the
  /// failing round if a certificate cannot be maintained.
  const TurnRecord& turn(size_t k);
  const GlobalState& state_after_turn(size_t k);

  /// The turn process's action at turn k and the state after the turn.
  std::pair<Action, GlobalState> nth_step(size_t k);

  size_t turns_generated() const { return turns_.size(); }
  const Fork& current_fork() const { return fork_; }

  /// Append-only record of every applied action with the digest of the state
  /// it produced; none of these states has a decided process.
  const std::vector<std::pair<Action, uint64_t>>& history() const {
    return history_;
  }

 private:
  void advance();

  std::shared_ptr<const Protocol> protocol_;
  SearchBudget budget_;
  Variant variant_;
  BivalentInit binit_;
  GlobalState current_;
  Fork fork_;
  std::vector<TurnRecord> turns_;
  std::vector<GlobalState> states_;
  std::vector<std::pair<Action, uint64_t>> history_;
};

}  // namespace waffle::adversary

#endif  // WAFFLE_ADVERSARY_HPP_
