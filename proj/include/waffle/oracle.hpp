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

#ifndef WAFFLE_ORACLE_HPP_
#define WAFFLE_ORACLE_HPP_

#include <optional>
#include <vector>

#include "waffle/model.hpp"

namespace waffle::oracle {

/// Bounds on any one search. Budgets turn ideal decidability into
/// three-valued answers: yes / certified-no / unknown.
struct SearchBudget {
  int max_depth = 12;
  size_t max_states = 2'000'000;
};

enum class SearchStatus {
  Decided,           // a deciding state was found
  ClosedNoDecision,  // the whole restricted closure was explored, no decision
  BudgetExhausted,   // the budget cut the search off; nothing is certified
};

/// A witness that a restricted set of processes can drive the system to a
/// decision: the execution found, the deciding process and its bit, and the
/// digest of the deciding state.
struct WitnessResult {
  Execution execution;
  ProcessId decider = 0;
  Bit value = 0;
  uint64_t end_digest = 0;
};

struct WitnessOutcome {
  SearchStatus status = SearchStatus::BudgetExhausted;
  std::optional<WitnessResult> witness;
  size_t states_visited = 0;
  /// True only when the restricted closure was fully enumerated. Together
  /// with ClosedNoDecision this is a certified blocking certificate for
  /// (state, Q).
  bool frontier_empty = false;
};

/**
 * The computable nonblocking witness: breadth-first search over executions
 * from `s` restricted to actions of processes in Q, expanding actions in
 * canonical order with visited-state deduplication, returning the first
 * deciding state in BFS order -- hence the shortest, lexicographically least
 * witness. Deterministic. The decider is always a member of Q.
 *
 * Requires |Q| = n - 1 (t = 1); throws PreconditionError otherwise.
 */
WitnessOutcome witness_search(const Protocol& p, const GlobalState& s,
                              const ProcessSet& q, const SearchBudget& budget);

enum class Verdict { Yes, No, Unknown };

struct VPossibleOutcome {
  Verdict verdict = Verdict::Unknown;
  std::optional<WitnessResult> witness;  // set when verdict == Yes
};

/// Decides v-possibility by computing the witness for Q_1 .. Q_n in order.
/// Yes with the first v-deciding witness; No when every search completed and
/// none decided v; Unknown when some search hit its budget first.
VPossibleOutcome v_possible(const Protocol& p, const GlobalState& s, Bit v,
                            const SearchBudget& budget);

/**
 * A pair of executions from one state deciding opposite values. By
 * convention alpha decides alpha_value and beta decides the complement.
 * For an i-fork, beta avoids every action of process i; for a full i-fork
 * both branches do. i_len counts the i-actions on alpha, so a fork is full
 * iff i_len == 0.
 */
struct Fork {
  GlobalState origin;
  Execution alpha;
  Execution beta;
  Bit alpha_value = 1;
};

int i_len(const Fork& fork, ProcessId i);

/// Recomputes both branch ends and checks the fork's claims: both branches
/// run from origin and decide opposite bits. Throws Error on violation.
void validate_fork(const Protocol& p, const Fork& fork);

struct BivalenceOutcome {
  std::optional<Fork> fork;   // set iff both values were reached
  bool complete = false;      // search exhausted the (restricted) closure
  bool found_zero = false;
  bool found_one = false;
  std::optional<Execution> zero_exec;
  std::optional<Execution> one_exec;
  size_t states_visited = 0;
};

/// Searches all processes' actions for a 0-deciding and a 1-deciding
/// execution from s. Decided states are leaves: by decision stability their
/// continuations cannot reach the opposite value.
BivalenceOutcome certify_bivalent(const Protocol& p, const GlobalState& s,
                                  const SearchBudget& budget);

/// Same, restricted to Q_i actions: a success certifies s bivalent via Q_i
/// and the result is a full i-fork.
BivalenceOutcome certify_bivalent_via(const Protocol& p, const GlobalState& s,
                                      ProcessId i, const SearchBudget& budget);

struct BlockingOutcome {
  Verdict verdict = Verdict::Unknown;  // Yes = certified blocking pair found
  std::optional<GlobalState> state;
  ProcessId failed = 0;
  InitVector init;          // initialization the state was reached from
  Schedule path;            // schedule from that initialization to the state
  size_t states_visited = 0;
};

/**
 * Enumerates reachable states breadth-first over every initialization
 * (ladder plus all 2^n vectors at small n) and returns the first (s, i) whose
 * Q_i-closure was fully explored with no decision -- a constructively
 * certified blocking scenario. No = the whole reachable space was exhausted
 * without one; Unknown = some budget cut off first. Outer exploration and
 * inner witness searches share one max_states meter.
 */
BlockingOutcome find_blocking(const Protocol& p, const SearchBudget& budget);

struct AgreementOutcome {
  Verdict verdict = Verdict::Unknown;  // Yes = violation found
  std::optional<Execution> violation;  // reaches a state deciding both bits
  InitVector init;
  size_t states_visited = 0;
  bool complete_to_depth = false;  // No means: none within budget.max_depth
};

/// Explores reachable states from all 2^n initializations (the ladder subset
/// when 2^n exceeds the budget) for a state whose decision map contains both
/// bits.
AgreementOutcome check_agreement(const Protocol& p, const SearchBudget& budget);

/// Same, from explicit initializations.
AgreementOutcome check_agreement_from(const Protocol& p,
                                      const std::vector<InitVector>& inits,
                                      const SearchBudget& budget);

}  // namespace waffle::oracle

#endif  // WAFFLE_ORACLE_HPP_
