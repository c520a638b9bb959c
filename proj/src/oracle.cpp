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

#include "waffle/oracle.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

namespace waffle::oracle {

namespace {

struct SearchNode {
  GlobalState state;
  int64_t parent;  // -1 for roots
  Action act;      // action that produced this node
  uint32_t depth;
  uint32_t root;   // index of the originating root, for multi-root searches
};

/// Visited set keyed by digest, confirmed by structural equality so hash
/// collisions can never merge distinct states. A successful insert claims
/// index nodes.size(): the caller must push the state next or stop the
/// search entirely.
class VisitedSet {
 public:
  bool insert(const std::deque<SearchNode>& nodes, const GlobalState& s,
              uint64_t dig) {
    auto [it, fresh] = map_.try_emplace(dig);
    if (!fresh) {
      for (size_t idx : it->second) {
        if (nodes[idx].state == s) return false;
      }
    }
    it->second.push_back(nodes.size());
    return true;
  }

 private:
  std::unordered_map<uint64_t, std::vector<size_t>> map_;
};

Schedule reconstruct(const std::deque<SearchNode>& nodes, int64_t leaf) {
  Schedule out;
  for (int64_t at = leaf; at >= 0 && nodes[at].parent >= 0;
       at = nodes[at].parent) {
    out.push_back(nodes[at].act);
  }
  // root-to-leaf order
  std::reverse(out.begin(), out.end());
  return out;
}

/// Enabled actions of processes in q, in canonical order.
std::vector<Action> enabled_in(const GlobalState& s, const ProcessSet& q) {
  std::vector<Action> out;
  const int n = s.config.n;
  for (ProcessId r = 1; r <= n; ++r) {
    if (!q.contains(r)) continue;
    for (ProcessId snd = 1; snd <= n; ++snd) {
      if (snd != r && !s.channel(snd, r).empty()) {
        out.push_back(Action::deliver(r, snd));
      }
    }
    out.push_back(Action::null_step(r));
  }
  return out;
}

}  // namespace

WitnessOutcome witness_search(const Protocol& p, const GlobalState& s,
                              const ProcessSet& q, const SearchBudget& budget) {
  const int n = p.n();
  if (q.n != n || q.size() != n - 1) {
    throw PreconditionError("witness subset must have n-1 members (t = 1)");
  }

  WitnessOutcome out;
  auto finish = [&](int64_t leaf, const GlobalState& end,
                    std::pair<ProcessId, Bit> dec,
                    const std::deque<SearchNode>& nodes,
                    const Action* last) -> WitnessOutcome {
    Schedule sched = reconstruct(nodes, leaf);
    if (last) sched.push_back(*last);
    out.status = SearchStatus::Decided;
    out.witness = WitnessResult{Execution{s, std::move(sched), end},
                                dec.first, dec.second, state_digest(end)};
    return out;
  };

  std::deque<SearchNode> nodes;
  VisitedSet visited;

  if (auto dec = first_decider_in(p, s, q)) {
    nodes.push_back(SearchNode{s, -1, Action{}, 0, 0});
    out.states_visited = 1;
    return finish(0, s, *dec, nodes, nullptr);
  }

  nodes.push_back(SearchNode{s, -1, Action{}, 0, 0});
  visited.insert(nodes, s, state_digest(s));

  bool cutoff = false;
  for (size_t head = 0; head < nodes.size(); ++head) {
    if (nodes[head].depth >= static_cast<uint32_t>(budget.max_depth)) {
      cutoff = true;
      continue;
    }
    for (const Action& a : enabled_in(nodes[head].state, q)) {
      GlobalState child = apply_action(p, nodes[head].state, a);
      uint64_t dig = state_digest(child);
      if (!visited.insert(nodes, child, dig)) continue;
      if (auto dec = first_decider_in(p, child, q)) {
        out.states_visited = nodes.size() + 1;
        return finish(static_cast<int64_t>(head), child, *dec, nodes, &a);
      }
      if (nodes.size() + 1 > budget.max_states) {
        out.states_visited = nodes.size();
        out.status = SearchStatus::BudgetExhausted;
        return out;
      }
      nodes.push_back(SearchNode{std::move(child), static_cast<int64_t>(head),
                                 a, nodes[head].depth + 1, 0});
    }
  }

  out.states_visited = nodes.size();
  out.frontier_empty = !cutoff;
  out.status = cutoff ? SearchStatus::BudgetExhausted
                      : SearchStatus::ClosedNoDecision;
  return out;
}

VPossibleOutcome v_possible(const Protocol& p, const GlobalState& s, Bit v,
                            const SearchBudget& budget) {
  VPossibleOutcome out;
  bool any_unknown = false;
  for (ProcessId i = 1; i <= p.n(); ++i) {
    WitnessOutcome w =
        witness_search(p, s, ProcessSet::without(p.n(), i), budget);
    if (w.status == SearchStatus::Decided && w.witness->value == v) {
      out.verdict = Verdict::Yes;
      out.witness = std::move(w.witness);
      return out;
    }
    if (w.status == SearchStatus::BudgetExhausted) any_unknown = true;
  }
  out.verdict = any_unknown ? Verdict::Unknown : Verdict::No;
  return out;
}

int i_len(const Fork& fork, ProcessId i) {
  int count = 0;
  for (const Action& a : fork.alpha.actions) {
    if (a.process == i) ++count;
  }
  return count;
}

void validate_fork(const Protocol& p, const Fork& fork) {
  auto check_branch = [&](const Execution& e, Bit expect) {
    if (!(e.start == fork.origin)) {
      throw Error("fork branch does not start at the origin");
    }
    Execution rerun = run_schedule(p, fork.origin, e.actions);
    if (!(rerun.final_state == e.final_state)) {
      throw Error("fork branch end state does not replay");
    }
    DecisionSummary sum = decision_summary(p, rerun.final_state);
    if (!sum.any_decided || sum.conflict || *sum.value != expect) {
      throw Error("fork branch does not decide " + std::to_string(expect));
    }
  };
  check_branch(fork.alpha, fork.alpha_value);
  check_branch(fork.beta, 1 - fork.alpha_value);
}

namespace {

BivalenceOutcome bivalence_search(const Protocol& p, const GlobalState& s,
                                  const ProcessSet& q,
                                  const SearchBudget& budget) {
  BivalenceOutcome out;
  std::deque<SearchNode> nodes;
  VisitedSet visited;

  auto record = [&](int64_t leaf, const GlobalState& end, const Action* last) {
    DecisionSummary sum = decision_summary(p, end);
    if (!sum.any_decided) return;
    Schedule sched = reconstruct(nodes, leaf);
    if (last) sched.push_back(*last);
    Execution exec{s, std::move(sched), end};
    // A conflicted state exhibits both values at once.
    bool zero = (sum.value && *sum.value == 0) || sum.conflict;
    bool one = (sum.value && *sum.value == 1) || sum.conflict;
    if (zero && !out.found_zero) {
      out.found_zero = true;
      out.zero_exec = exec;
    }
    if (one && !out.found_one) {
      out.found_one = true;
      out.one_exec = std::move(exec);
    }
  };

  nodes.push_back(SearchNode{s, -1, Action{}, 0, 0});
  visited.insert(nodes, s, state_digest(s));
  record(0, s, nullptr);

  bool cutoff = false;
  for (size_t head = 0;
       head < nodes.size() && !(out.found_zero && out.found_one); ++head) {
    // Decided states are leaves: stability pins every continuation to the
    // value already shown.
    if (decision_summary(p, nodes[head].state).any_decided) continue;
    if (nodes[head].depth >= static_cast<uint32_t>(budget.max_depth)) {
      cutoff = true;
      continue;
    }
    for (const Action& a : enabled_in(nodes[head].state, q)) {
      GlobalState child = apply_action(p, nodes[head].state, a);
      uint64_t dig = state_digest(child);
      if (!visited.insert(nodes, child, dig)) continue;
      record(static_cast<int64_t>(head), child, &a);
      if (out.found_zero && out.found_one) break;
      if (nodes.size() + 1 > budget.max_states) {
        out.states_visited = nodes.size();
        return out;  // complete stays false
      }
      nodes.push_back(SearchNode{std::move(child), static_cast<int64_t>(head),
                                 a, nodes[head].depth + 1, 0});
    }
  }

  out.states_visited = nodes.size();
  if (out.found_zero && out.found_one) {
    out.fork = Fork{s, *out.one_exec, *out.zero_exec, 1};
  } else {
    out.complete = !cutoff;
  }
  return out;
}

}  // namespace

BivalenceOutcome certify_bivalent(const Protocol& p, const GlobalState& s,
                                  const SearchBudget& budget) {
  return bivalence_search(p, s, ProcessSet::all(p.n()), budget);
}

BivalenceOutcome certify_bivalent_via(const Protocol& p, const GlobalState& s,
                                      ProcessId i, const SearchBudget& budget) {
  return bivalence_search(p, s, ProcessSet::without(p.n(), i), budget);
}

namespace {

std::vector<InitVector> default_roots(int n, bool include_all_vectors) {
  std::set<InitVector> seen;
  std::vector<InitVector> roots;
  for (int j = 0; j <= n; ++j) {
    InitVector iv = ladder_vector(n, j);
    if (seen.insert(iv).second) roots.push_back(iv);
  }
  if (include_all_vectors && n <= 12) {
    for (uint32_t bitsv = 0; bitsv < (1u << n); ++bitsv) {
      InitVector iv(n, 0);
      for (int i = 0; i < n; ++i) iv[i] = (bitsv >> i) & 1;
      if (seen.insert(iv).second) roots.push_back(iv);
    }
  }
  return roots;
}

bool all_decided(const Protocol& p, const GlobalState& s) {
  for (ProcessId i = 1; i <= p.n(); ++i) {
    if (!p.decided(s.local(i))) return false;
  }
  return true;
}

}  // namespace

BlockingOutcome find_blocking(const Protocol& p, const SearchBudget& budget) {
  const int n = p.n();
  BlockingOutcome out;
  std::vector<InitVector> roots = default_roots(n, true);

  std::deque<SearchNode> nodes;
  VisitedSet visited;
  size_t meter = 0;  // shared by outer enumeration and inner witness searches

  for (size_t r = 0; r < roots.size(); ++r) {
    GlobalState s0 = make_initial(p, roots[r]);
    uint64_t dig = state_digest(s0);
    if (visited.insert(nodes, s0, dig)) {
      nodes.push_back(
          SearchNode{std::move(s0), -1, Action{}, 0, static_cast<uint32_t>(r)});
      ++meter;
    }
  }

  ProcessSet everyone = ProcessSet::all(n);
  bool cutoff = false;
  bool inner_unknown = false;

  for (size_t head = 0; head < nodes.size(); ++head) {
    // Check this state against every single-failure subset.
    for (ProcessId i = 1; i <= n; ++i) {
      if (meter >= budget.max_states) {
        out.verdict = Verdict::Unknown;
        out.states_visited = meter;
        return out;
      }
      SearchBudget inner{budget.max_depth, budget.max_states - meter};
      WitnessOutcome w = witness_search(p, nodes[head].state,
                                        ProcessSet::without(n, i), inner);
      meter += w.states_visited;
      if (w.status == SearchStatus::ClosedNoDecision) {
        out.verdict = Verdict::Yes;
        out.state = nodes[head].state;
        out.failed = i;
        out.init = roots[nodes[head].root];
        out.path = reconstruct(nodes, static_cast<int64_t>(head));
        out.states_visited = meter;
        return out;
      }
      if (w.status == SearchStatus::BudgetExhausted) inner_unknown = true;
    }

    if (all_decided(p, nodes[head].state)) continue;  // nothing new downstream
    if (nodes[head].depth >= static_cast<uint32_t>(budget.max_depth)) {
      cutoff = true;
      continue;
    }
    for (const Action& a : enabled_in(nodes[head].state, everyone)) {
      GlobalState child = apply_action(p, nodes[head].state, a);
      uint64_t dig = state_digest(child);
      if (!visited.insert(nodes, child, dig)) continue;
      if (++meter >= budget.max_states) {
        out.verdict = Verdict::Unknown;
        out.states_visited = meter;
        return out;
      }
      nodes.push_back(SearchNode{std::move(child), static_cast<int64_t>(head),
                                 a, nodes[head].depth + 1, nodes[head].root});
    }
  }

  out.states_visited = meter;
  out.verdict =
      (cutoff || inner_unknown) ? Verdict::Unknown : Verdict::No;
  return out;
}

AgreementOutcome check_agreement_from(const Protocol& p,
                                      const std::vector<InitVector>& inits,
                                      const SearchBudget& budget) {
  const int n = p.n();
  AgreementOutcome out;
  std::deque<SearchNode> nodes;
  VisitedSet visited;

  auto violation_at = [&](int64_t leaf, const GlobalState& end,
                          const Action* last, uint32_t root) {
    Schedule sched = reconstruct(nodes, leaf);
    if (last) sched.push_back(*last);
    out.verdict = Verdict::Yes;
    out.violation = Execution{make_initial(p, inits[root]), std::move(sched), end};
    out.init = inits[root];
  };

  for (size_t r = 0; r < inits.size(); ++r) {
    GlobalState s0 = make_initial(p, inits[r]);
    if (decision_summary(p, s0).conflict) {
      nodes.push_back(
          SearchNode{s0, -1, Action{}, 0, static_cast<uint32_t>(r)});
      violation_at(static_cast<int64_t>(nodes.size()) - 1, s0, nullptr,
                   static_cast<uint32_t>(r));
      out.states_visited = nodes.size();
      return out;
    }
    uint64_t dig = state_digest(s0);
    if (visited.insert(nodes, s0, dig)) {
      nodes.push_back(SearchNode{std::move(s0), -1, Action{}, 0,
                                 static_cast<uint32_t>(r)});
    }
  }

  ProcessSet everyone = ProcessSet::all(n);
  bool states_cut = false;

  for (size_t head = 0; head < nodes.size(); ++head) {
    if (all_decided(p, nodes[head].state)) continue;  // no new decisions left
    if (nodes[head].depth >= static_cast<uint32_t>(budget.max_depth)) continue;
    for (const Action& a : enabled_in(nodes[head].state, everyone)) {
      GlobalState child = apply_action(p, nodes[head].state, a);
      uint64_t dig = state_digest(child);
      if (!visited.insert(nodes, child, dig)) continue;
      if (decision_summary(p, child).conflict) {
        violation_at(static_cast<int64_t>(head), child, &a, nodes[head].root);
        out.states_visited = nodes.size() + 1;
        return out;
      }
      if (nodes.size() + 1 > budget.max_states) {
        states_cut = true;
        break;
      }
      nodes.push_back(SearchNode{std::move(child), static_cast<int64_t>(head),
                                 a, nodes[head].depth + 1, nodes[head].root});
    }
    if (states_cut) break;
  }

  out.states_visited = nodes.size();
  out.complete_to_depth = !states_cut;
  out.verdict = states_cut ? Verdict::Unknown : Verdict::No;
  return out;
}

AgreementOutcome check_agreement(const Protocol& p, const SearchBudget& budget) {
  const int n = p.n();
  std::vector<InitVector> inits;
  if (n <= 12 && (1u << n) <= budget.max_states) {
    for (uint32_t bitsv = 0; bitsv < (1u << n); ++bitsv) {
      InitVector iv(n, 0);
      for (int i = 0; i < n; ++i) iv[i] = (bitsv >> i) & 1;
      inits.push_back(iv);
    }
  } else {
    for (int j = 0; j <= n; ++j) inits.push_back(ladder_vector(n, j));
  }
  return check_agreement_from(p, inits, budget);
}

}  // namespace waffle::oracle
