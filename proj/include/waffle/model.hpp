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

#ifndef WAFFLE_MODEL_HPP_
#define WAFFLE_MODEL_HPP_

#include <map>
#include <optional>

#include "waffle/protocol.hpp"
#include "waffle/state.hpp"
#include "waffle/types.hpp"

namespace waffle {

/**
 * Builds the initial global state: every local state set by the protocol's
 * init, all initial sends enqueued in ascending (sender, receiver) order,
 * channels otherwise empty. Throws ArityError if the vector size doesn't
 * match the protocol's process count.
 */
GlobalState make_initial(const Protocol& p, const InitVector& iv);

/// make_initial with the ladder vector s_j. Throws OutOfRangeError unless
/// 0 <= j <= n.
GlobalState ladder_init(const Protocol& p, int j);

/// Every enabled action in canonical order: ascending acting process, Deliver
/// before Null, ascending sender. Null steps are always enabled.
std::vector<Action> enabled_actions(const GlobalState& s);

bool action_enabled(const GlobalState& s, const Action& a);

/**
 * Applies one action. Pure: `s` is untouched, identical inputs give identical
 * outputs. The acting process's local state is updated by the protocol's step
 * function, the delivered message (if any) is popped from its channel, and
 * sent messages are appended to channel tails in ascending receiver order.
 *
 * Throws DisabledActionError for a Deliver on an empty channel and
 * StabilityError if the step changes an existing decision.
 */
GlobalState apply_action(const Protocol& p, const GlobalState& s,
                         const Action& a, size_t index = 0);

/// An execution: a start state plus a schedule every action of which was
/// enabled when applied. The intermediate states are derived on demand.
struct Execution {
  GlobalState start;
  Schedule actions;
  GlobalState final_state;

  /// Recomputes the full state sequence s_0 .. s_k (length actions+1).
  std::vector<GlobalState> states(const Protocol& p) const;
};

/// Runs a schedule from a state. Throws DisabledActionError carrying the
/// failing index if some action is disabled when reached.
Execution run_schedule(const Protocol& p, const GlobalState& s,
                       const Schedule& sched);

/**
 * Runs a schedule from a different start state than it was found on; actions
 * re-resolve channel heads in the new state. Succeeds iff every action is
 * enabled in sequence; throws ReplayError with the failing index otherwise.
 * When the two states differ only in the local state of a process outside
 * participants(sched) and in channels delivering to such processes, replay
 * must succeed and every participant traverses identical local states.
 */
Execution replay(const Protocol& p, const Schedule& sched,
                 const GlobalState& from);

/**
 * Joins two participant-disjoint schedules, both enabled from `s`, and checks
 * that the two interleavings sigma1;sigma2 and sigma2;sigma1 reach the same
 * state. Returns that state. Throws NotDisjointError / PreconditionError for
 * bad inputs and CommutationError if the two orders disagree (which would
 * falsify the model).
 */
GlobalState commute_join(const Protocol& p, const GlobalState& s,
                         const Schedule& sigma1, const Schedule& sigma2);

/// Per-process decision readout in ascending process order.
std::map<ProcessId, std::optional<Bit>> decided_map(const Protocol& p,
                                                    const GlobalState& s);

struct DecisionSummary {
  bool any_decided = false;
  bool conflict = false;             // both bits present somewhere
  std::optional<Bit> value;          // meaningful when any_decided && !conflict
  ProcessId first_decider = 0;       // least decided process, 0 if none
};

DecisionSummary decision_summary(const Protocol& p, const GlobalState& s);

/// Least process in `within` that has decided, with its bit.
std::optional<std::pair<ProcessId, Bit>> first_decider_in(
    const Protocol& p, const GlobalState& s, const ProcessSet& within);

}  // namespace waffle

#endif  // WAFFLE_MODEL_HPP_
