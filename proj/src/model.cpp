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

#include "waffle/model.hpp"

#include <algorithm>

namespace waffle {

namespace {

void enqueue_sends(GlobalState& s, ProcessId sender,
                   std::vector<Send> sends) {
  // Tail-append in ascending receiver order; stable so a double send to the
  // same receiver keeps its order.
  std::stable_sort(sends.begin(), sends.end(),
                   [](const Send& a, const Send& b) { return a.to < b.to; });
  for (const Send& snd : sends) {
    if (snd.to == sender || snd.to < 1 || snd.to > s.config.n) {
      throw Error("protocol sent to invalid receiver " +
                  std::to_string(snd.to) + " from " + std::to_string(sender));
    }
    s.channel(sender, snd.to).push_back(snd.payload);
  }
}

}  // namespace

GlobalState make_initial(const Protocol& p, const InitVector& iv) {
  const int n = p.n();
  if (static_cast<int>(iv.size()) != n) {
    throw ArityError("init vector has " + std::to_string(iv.size()) +
                     " entries, protocol needs " + std::to_string(n));
  }
  GlobalState s;
  s.config = SystemConfig{n, 1, p.name()};
  s.locals.resize(n);
  s.channels.assign(static_cast<size_t>(n) * n, {});

  // Initial sends are enqueued in ascending (sender, receiver) order, which
  // the per-sender loop plus enqueue_sends's receiver sort gives directly.
  for (ProcessId i = 1; i <= n; ++i) {
    StepEffect eff = p.init(i, iv[i - 1]);
    s.local(i) = std::move(eff.state);
    enqueue_sends(s, i, std::move(eff.sends));
  }
  return s;
}

GlobalState ladder_init(const Protocol& p, int j) {
  if (j < 0 || j > p.n()) {
    throw OutOfRangeError("ladder index " + std::to_string(j) +
                          " out of range 0.." + std::to_string(p.n()));
  }
  return make_initial(p, ladder_vector(p.n(), j));
}

std::vector<Action> enabled_actions(const GlobalState& s) {
  std::vector<Action> out;
  const int n = s.config.n;
  for (ProcessId r = 1; r <= n; ++r) {
    for (ProcessId snd = 1; snd <= n; ++snd) {
      if (snd != r && !s.channel(snd, r).empty()) {
        out.push_back(Action::deliver(r, snd));
      }
    }
    out.push_back(Action::null_step(r));
  }
  return out;
}

bool action_enabled(const GlobalState& s, const Action& a) {
  if (a.process < 1 || a.process > s.config.n) return false;
  if (a.kind == ActionKind::Null) return true;
  if (a.sender < 1 || a.sender > s.config.n || a.sender == a.process) {
    return false;
  }
  return !s.channel(a.sender, a.process).empty();
}

GlobalState apply_action(const Protocol& p, const GlobalState& s,
                         const Action& a, size_t index) {
  if (!action_enabled(s, a)) throw DisabledActionError(a, index);

  GlobalState next = s;
  StepEffect eff;
  if (a.kind == ActionKind::Deliver) {
    auto& q = next.channel(a.sender, a.process);
    Payload msg = q.front();
    q.erase(q.begin());
    eff = p.on_deliver(a.process, s.local(a.process), msg, a.sender);
  } else {
    eff = p.on_null(a.process, s.local(a.process));
  }

  // Decisions are final: a decided process must report the same bit after
  // every step.
  auto before = p.decided(s.local(a.process));
  auto after = p.decided(eff.state);
  if (before.has_value() && (!after.has_value() || *after != *before)) {
    throw StabilityError("process " + std::to_string(a.process) +
                         " changed its decision");
  }

  next.local(a.process) = std::move(eff.state);
  enqueue_sends(next, a.process, std::move(eff.sends));
  return next;
}

std::vector<GlobalState> Execution::states(const Protocol& p) const {
  std::vector<GlobalState> out;
  out.reserve(actions.size() + 1);
  out.push_back(start);
  for (size_t i = 0; i < actions.size(); ++i) {
    out.push_back(apply_action(p, out.back(), actions[i], i));
  }
  return out;
}

Execution run_schedule(const Protocol& p, const GlobalState& s,
                       const Schedule& sched) {
  GlobalState cur = s;
  for (size_t i = 0; i < sched.size(); ++i) {
    cur = apply_action(p, cur, sched[i], i);
  }
  return Execution{s, sched, std::move(cur)};
}

Execution replay(const Protocol& p, const Schedule& sched,
                 const GlobalState& from) {
  GlobalState cur = from;
  for (size_t i = 0; i < sched.size(); ++i) {
    if (!action_enabled(cur, sched[i])) throw ReplayError(i);
    cur = apply_action(p, cur, sched[i], i);
  }
  return Execution{from, sched, std::move(cur)};
}

GlobalState commute_join(const Protocol& p, const GlobalState& s,
                         const Schedule& sigma1, const Schedule& sigma2) {
  const int n = s.config.n;
  ProcessSet p1 = participants(sigma1, n);
  ProcessSet p2 = participants(sigma2, n);
  if ((p1.bits & p2.bits) != 0) {
    throw NotDisjointError("schedules share a participant");
  }

  // Each schedule must be enabled from s on its own, and must consume only
  // messages already present in s from channels whose sender lies on the
  // other side of the partition (cross-partition messages stay delayed).
  auto check_delayed = [&](const Schedule& sched, const ProcessSet& other) {
    std::vector<size_t> pops(static_cast<size_t>(n) * n, 0);
    for (const Action& a : sched) {
      if (a.kind != ActionKind::Deliver) continue;
      size_t idx = static_cast<size_t>(a.sender - 1) * n + (a.process - 1);
      pops[idx]++;
      if (other.contains(a.sender) &&
          pops[idx] > s.channels[idx].size()) {
        throw PreconditionError(
            "schedule delivers a message sent during the other schedule");
      }
    }
  };
  check_delayed(sigma1, p2);
  check_delayed(sigma2, p1);

  Execution first = run_schedule(p, s, sigma1);
  try {
    first = run_schedule(p, first.final_state, sigma2);
  } catch (const DisabledActionError& e) {
    throw ReplayError(e.index);
  }

  Execution second = run_schedule(p, s, sigma2);
  try {
    second = run_schedule(p, second.final_state, sigma1);
  } catch (const DisabledActionError& e) {
    throw ReplayError(e.index);
  }

  if (!(first.final_state == second.final_state)) {
    throw CommutationError("disjoint schedules disagree across orders");
  }
  return first.final_state;
}

std::map<ProcessId, std::optional<Bit>> decided_map(const Protocol& p,
                                                    const GlobalState& s) {
  std::map<ProcessId, std::optional<Bit>> out;
  for (ProcessId i = 1; i <= s.config.n; ++i) {
    out[i] = p.decided(s.local(i));
  }
  return out;
}

DecisionSummary decision_summary(const Protocol& p, const GlobalState& s) {
  DecisionSummary sum;
  for (ProcessId i = 1; i <= s.config.n; ++i) {
    auto d = p.decided(s.local(i));
    if (!d) continue;
    if (!sum.any_decided) {
      sum.any_decided = true;
      sum.value = d;
      sum.first_decider = i;
    } else if (*sum.value != *d) {
      sum.conflict = true;
    }
  }
  if (sum.conflict) sum.value.reset();
  return sum;
}

std::optional<std::pair<ProcessId, Bit>> first_decider_in(
    const Protocol& p, const GlobalState& s, const ProcessSet& within) {
  for (ProcessId i = 1; i <= s.config.n; ++i) {
    if (!within.contains(i)) continue;
    auto d = p.decided(s.local(i));
    if (d) return std::make_pair(i, *d);
  }
  return std::nullopt;
}

}  // namespace waffle
