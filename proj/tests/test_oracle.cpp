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

#include <deque>
#include <random>
#include <set>

#include "doctest.h"
#include "waffle/adversary.hpp"
#include "waffle/model.hpp"
#include "waffle/oracle.hpp"
#include "waffle/protocols.hpp"

using namespace waffle;
using oracle::SearchBudget;
using oracle::SearchStatus;
using oracle::Verdict;

namespace {

// --- independent oracles (plain recursion, no canonical order, no reuse of
// the production search code) ------------------------------------------------

/// Does any execution of <= depth actions by processes in q reach a state
/// where a member of q decides v?
bool brute_q_decides(const Protocol& p, const GlobalState& s,
                     const ProcessSet& q, Bit v, int depth) {
  for (ProcessId i : q.ids()) {
    auto d = p.decided(s.local(i));
    if (d && *d == v) return true;
  }
  if (depth == 0) return false;
  std::vector<Action> acts;
  for (const Action& a : enabled_actions(s)) {
    if (q.contains(a.process)) acts.push_back(a);
  }
  for (auto it = acts.rbegin(); it != acts.rend(); ++it) {  // any order works
    if (brute_q_decides(p, apply_action(p, s, *it), q, v, depth - 1)) {
      return true;
    }
  }
  return false;
}

/// The v-possibility question settled by brute force over all co-singleton
/// subsets.
bool brute_v_possible(const Protocol& p, const GlobalState& s, Bit v,
                      int depth) {
  for (ProcessId i = 1; i <= p.n(); ++i) {
    if (brute_q_decides(p, s, ProcessSet::without(p.n(), i), v, depth)) {
      return true;
    }
  }
  return false;
}

/// Length of the shortest q-restricted execution reaching a q decision, or
/// -1 if none exists within the depth bound.
int brute_shortest_decision(const Protocol& p, const GlobalState& s,
                            const ProcessSet& q, int depth) {
  for (ProcessId i : q.ids()) {
    if (p.decided(s.local(i))) return 0;
  }
  if (depth == 0) return -1;
  int best = -1;
  for (const Action& a : enabled_actions(s)) {
    if (!q.contains(a.process)) continue;
    int sub = brute_shortest_decision(p, apply_action(p, s, a), q, depth - 1);
    if (sub >= 0 && (best < 0 || sub + 1 < best)) best = sub + 1;
  }
  return best;
}

/// Exhaustive closure check, written independently of the production BFS:
/// explores every q-restricted successor with a set-based visited list and
/// reports whether any state has a decided member of q.
bool closure_has_decision(const Protocol& p, const GlobalState& s,
                          const ProcessSet& q) {
  std::set<std::string> visited;
  auto key = [](const GlobalState& g) {
    std::string k;
    for (const auto& l : g.locals) {
      for (int32_t w : l.words) k += std::to_string(w) + ",";
      k += ";";
    }
    for (const auto& ch : g.channels) {
      for (const Payload& m : ch) {
        k += std::to_string(m.tag) + "." + std::to_string(m.a) + "." +
             std::to_string(m.b) + ",";
      }
      k += "|";
    }
    return k;
  };
  std::deque<GlobalState> frontier{s};
  visited.insert(key(s));
  while (!frontier.empty()) {
    GlobalState cur = std::move(frontier.front());
    frontier.pop_front();
    for (ProcessId i : q.ids()) {
      if (p.decided(cur.local(i))) return true;
    }
    for (const Action& a : enabled_actions(cur)) {
      if (!q.contains(a.process)) continue;
      GlobalState next = apply_action(p, cur, a);
      if (visited.insert(key(next)).second) {
        frontier.push_back(std::move(next));
      }
    }
  }
  return false;
}

GlobalState random_reachable(const Protocol& p, std::mt19937_64& rng,
                             int max_walk) {
  InitVector iv(p.n(), 0);
  for (int i = 0; i < p.n(); ++i) iv[i] = static_cast<Bit>(rng() % 2);
  GlobalState s = make_initial(p, iv);
  int len = static_cast<int>(rng() % (max_walk + 1));
  for (int k = 0; k < len; ++k) {
    std::vector<Action> acts = enabled_actions(s);
    s = apply_action(p, s, acts[rng() % acts.size()]);
  }
  return s;
}

}  // namespace

TEST_CASE("witness from the all-zero init decides 0 under any subset") {
  UniformVote p(3);
  GlobalState s = make_initial(p, {0, 0, 0});
  auto w = oracle::witness_search(p, s, ProcessSet::without(3, 1), {});
  REQUIRE(w.status == SearchStatus::Decided);
  CHECK(w.witness->value == 0);
  CHECK(ProcessSet::without(3, 1).contains(w.witness->decider));
}

TEST_CASE("the wait-for-all protocol certifies blocked at initialization") {
  FloodAll p(3);
  GlobalState s = make_initial(p, {0, 1, 0});
  auto w = oracle::witness_search(p, s, ProcessSet::without(3, 3), {});
  CHECK(w.status == SearchStatus::ClosedNoDecision);
  CHECK(w.frontier_empty);
  // independent confirmation of the closure
  CHECK_FALSE(closure_has_decision(p, s, ProcessSet::without(3, 3)));
}

TEST_CASE("witness schedules replay to their recorded end") {
  UniformVote p(3);
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    GlobalState s = random_reachable(p, rng, 6);
    ProcessId i = static_cast<ProcessId>(trial % 3) + 1;
    auto w = oracle::witness_search(p, s, ProcessSet::without(3, i),
                                    SearchBudget{16, 2'000'000});
    REQUIRE(w.status == SearchStatus::Decided);
    Execution rerun = run_schedule(p, s, w.witness->execution.actions);
    CHECK(state_digest(rerun.final_state) == w.witness->end_digest);
    CHECK(p.decided(rerun.final_state.local(w.witness->decider)) ==
          w.witness->value);
    // restriction: every participant is in the subset
    CHECK(participants(w.witness->execution.actions, 3)
              .subset_of(ProcessSet::without(3, i)));
    ++checked;
  }
  CHECK(checked == 30);
}

TEST_CASE("the witness is deterministic and shortest") {
  FloodAll p(2);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    GlobalState s = random_reachable(p, rng, 4);
    ProcessSet q = ProcessSet::without(2, static_cast<ProcessId>(trial % 2) + 1);
    auto w1 = oracle::witness_search(p, s, q, SearchBudget{8, 100'000});
    auto w2 = oracle::witness_search(p, s, q, SearchBudget{8, 100'000});
    REQUIRE(w1.status == w2.status);
    int shortest = brute_shortest_decision(p, s, q, 8);
    if (w1.status == SearchStatus::Decided) {
      CHECK(w1.witness->execution.actions == w2.witness->execution.actions);
      CHECK(static_cast<int>(w1.witness->execution.actions.size()) == shortest);
    } else {
      CHECK(shortest == -1);
    }
  }
}

namespace {

/// All q-restricted schedules of exactly `len` actions from s that end in a
/// q decision, appended to out.
void collect_deciding(const Protocol& p, const GlobalState& s,
                      const ProcessSet& q, int len, Schedule& prefix,
                      std::vector<Schedule>& out) {
  bool decided = false;
  for (ProcessId i : q.ids()) {
    if (p.decided(s.local(i))) decided = true;
  }
  if (len == 0) {
    if (decided) out.push_back(prefix);
    return;
  }
  if (decided) return;  // longer schedules past a decision are not minimal
  for (const Action& a : enabled_actions(s)) {
    if (!q.contains(a.process)) continue;
    prefix.push_back(a);
    collect_deciding(p, apply_action(p, s, a), q, len - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

TEST_CASE("the witness is the lexicographically least shortest schedule") {
  FloodAll p(2);
  std::mt19937_64 rng(13);
  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    GlobalState s = random_reachable(p, rng, 5);
    ProcessSet q = ProcessSet::without(2, static_cast<ProcessId>(trial % 2) + 1);
    auto w = oracle::witness_search(p, s, q, SearchBudget{8, 100'000});
    if (w.status != SearchStatus::Decided) continue;
    std::vector<Schedule> all;
    Schedule prefix;
    collect_deciding(p, s, q, static_cast<int>(w.witness->execution.actions.size()),
                     prefix, all);
    REQUIRE_FALSE(all.empty());
    Schedule least = *std::min_element(all.begin(), all.end());
    CHECK(w.witness->execution.actions == least);
    ++compared;
  }
  CHECK(compared > 5);
}

TEST_CASE("wrongly sized subsets are rejected") {
  UniformVote p(3);
  GlobalState s = make_initial(p, {0, 0, 0});
  CHECK_THROWS_AS(oracle::witness_search(p, s, ProcessSet::all(3), {}),
                  PreconditionError);
}

TEST_CASE("v-possibility of the uniform initializations") {
  UniformVote p(3);
  GlobalState s = make_initial(p, {0, 0, 0});
  CHECK(oracle::v_possible(p, s, 0, {}).verdict == Verdict::Yes);
  CHECK(oracle::v_possible(p, s, 1, {}).verdict == Verdict::No);
}

TEST_CASE("the bivalent initialization is possible both ways") {
  UniformVote p(3);
  auto protocol = std::make_shared<UniformVote>(3);
  adversary::BivalentInit b = adversary::find_bivalent_init(p, {});
  CHECK(oracle::v_possible(p, b.state, 0, {}).verdict == Verdict::Yes);
  CHECK(oracle::v_possible(p, b.state, 1, {}).verdict == Verdict::Yes);
}

TEST_CASE("v_possible matches brute force at n=2") {
  std::mt19937_64 rng(77);
  for (const char* name : {kUniformVote, kFloodAll, kConstantDecide}) {
    auto p = make_protocol(name, 2);
    for (int trial = 0; trial < 15; ++trial) {
      GlobalState s = random_reachable(*p, rng, 4);
      for (Bit v : {0, 1}) {
        auto got = oracle::v_possible(*p, s, v, SearchBudget{6, 100'000});
        bool expect = brute_v_possible(*p, s, v, 6);
        REQUIRE(got.verdict != Verdict::Unknown);
        CHECK((got.verdict == Verdict::Yes) == expect);
      }
    }
  }
}

TEST_CASE("certify_bivalent finds only zero from the all-zero init") {
  UniformVote p(3);
  auto bv = oracle::certify_bivalent(p, make_initial(p, {0, 0, 0}), {});
  CHECK_FALSE(bv.fork.has_value());
  CHECK(bv.found_zero);
  CHECK_FALSE(bv.found_one);
  CHECK(bv.complete);
}

TEST_CASE("certify_bivalent returns a fork at the pivot rung") {
  UniformVote p(3);
  adversary::BivalentInit b = adversary::find_bivalent_init(p, {});
  auto bv = oracle::certify_bivalent(p, b.state, {});
  REQUIRE(bv.fork.has_value());
  oracle::validate_fork(p, *bv.fork);
}

TEST_CASE("a decided state cannot fork: stability excludes the other value") {
  ConstantDecide p(2);
  GlobalState s = make_initial(p, {1, 1});
  auto bv = oracle::certify_bivalent(p, s, {});
  CHECK_FALSE(bv.fork.has_value());
  CHECK(bv.found_one);
  CHECK_FALSE(bv.found_zero);
  CHECK(bv.complete);
}

TEST_CASE("no subset-restricted fork exists under a uniform init") {
  UniformVote p(3);
  GlobalState s = make_initial(p, {1, 1, 1});
  for (ProcessId i = 1; i <= 3; ++i) {
    auto bv = oracle::certify_bivalent_via(p, s, i, {});
    CHECK_FALSE(bv.fork.has_value());
    CHECK(bv.found_one);
    CHECK_FALSE(bv.found_zero);
  }
}

TEST_CASE("no fork via a subset that cannot reach one of the values") {
  // From a fresh flood-all init only messages from process 1 could carry its
  // input, so the singleton Q_1 = {2} can reach no decision at all.
  FloodAll p(2);
  GlobalState s = make_initial(p, {0, 1});
  auto bv = oracle::certify_bivalent_via(p, s, 1, {});
  CHECK_FALSE(bv.fork.has_value());
  CHECK_FALSE(bv.found_zero);
  CHECK_FALSE(bv.found_one);
  CHECK(bv.complete);
}

TEST_CASE("blocking search certifies the wait-for-all protocol") {
  FloodAll p(3);
  auto out = oracle::find_blocking(p, {});
  REQUIRE(out.verdict == Verdict::Yes);
  // soundness: independently re-enumerate the restricted closure
  GlobalState blocked =
      run_schedule(p, make_initial(p, out.init), out.path).final_state;
  CHECK(blocked == *out.state);
  CHECK_FALSE(closure_has_decision(
      p, blocked, ProcessSet::without(3, out.failed)));
}

TEST_CASE("blocking search exonerates the constant protocol") {
  ConstantDecide p(3);
  auto out = oracle::find_blocking(p, {});
  CHECK(out.verdict == Verdict::No);
}

TEST_CASE("blocking search never certifies the quorum-vote protocol") {
  UniformVote p(3);
  auto out = oracle::find_blocking(p, SearchBudget{12, 60'000});
  CHECK(out.verdict != Verdict::Yes);
}

TEST_CASE("agreement violations of the constant protocol are at the root") {
  ConstantDecide p(2);
  auto out = oracle::check_agreement(p, {});
  REQUIRE(out.verdict == Verdict::Yes);
  CHECK(out.violation->actions.empty());
}

TEST_CASE("quorum-vote agreement holds to the depth budget") {
  UniformVote p(3);
  auto out = oracle::check_agreement(p, SearchBudget{12, 2'000'000});
  CHECK(out.verdict == Verdict::No);
  CHECK(out.complete_to_depth);
}

TEST_CASE("uniform initializations never show the opposite value") {
  for (const char* name : {kUniformVote, kFloodAll}) {
    auto p = make_protocol(name, 3);
    for (Bit v : {0, 1}) {
      auto out = oracle::check_agreement_from(
          *p, {InitVector(3, v)}, SearchBudget{8, 500'000});
      CHECK(out.verdict == Verdict::No);
    }
  }
}
