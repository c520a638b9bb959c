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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the binary exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "waffle/adversary.hpp"
#include "waffle/model.hpp"
#include "waffle/oracle.hpp"
#include "waffle/protocols.hpp"
#include "waffle/trace.hpp"
#include "waffle/verify.hpp"

#ifndef WAFFLE_CLI_PATH
#error "WAFFLE_CLI_PATH must point at the built CLI"
#endif

using namespace waffle;
using oracle::SearchBudget;
using oracle::SearchStatus;
using oracle::Verdict;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("%s  criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(WAFFLE_CLI_PATH) + " " + args +
                    " > /dev/null 2> /dev/null";
  int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Independent exhaustive enumeration (dedup by full textual key, no shared
// code with the production searches): does any execution of at most `depth`
// actions of processes in q reach a state where a member of q decides v?
std::string state_key(const GlobalState& g) {
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
}

bool enumerate_decides(const Protocol& p, const GlobalState& s,
                       const ProcessSet& q, Bit v, int depth) {
  std::set<std::string> seen{state_key(s)};
  std::deque<std::pair<GlobalState, int>> frontier{{s, 0}};
  while (!frontier.empty()) {
    auto [cur, d] = std::move(frontier.front());
    frontier.pop_front();
    for (ProcessId i : q.ids()) {
      auto dec = p.decided(cur.local(i));
      if (dec && *dec == v) return true;
    }
    if (d == depth) continue;
    for (const Action& a : enabled_actions(cur)) {
      if (!q.contains(a.process)) continue;
      GlobalState next = apply_action(p, cur, a);
      if (seen.insert(state_key(next)).second) {
        frontier.emplace_back(std::move(next), d + 1);
      }
    }
  }
  return false;
}

/// Exhaustively enumerates the full q-restricted closure (no depth bound)
/// and reports whether any state has a deciding member of q.
bool enumerate_closure_decides(const Protocol& p, const GlobalState& s,
                               const ProcessSet& q) {
  std::set<std::string> seen{state_key(s)};
  std::deque<GlobalState> frontier{s};
  while (!frontier.empty()) {
    GlobalState cur = std::move(frontier.front());
    frontier.pop_front();
    for (ProcessId i : q.ids()) {
      if (p.decided(cur.local(i))) return true;
    }
    for (const Action& a : enabled_actions(cur)) {
      if (!q.contains(a.process)) continue;
      GlobalState next = apply_action(p, cur, a);
      if (seen.insert(state_key(next)).second) {
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

// --- criteria ----------------------------------------------------------------

void criterion_1_responsiveness() {
  auto t0 = std::chrono::steady_clock::now();
  UniformVote p(3);
  int exact = 0;
  for (Bit v : {0, 1}) {
    GlobalState s = make_initial(p, InitVector(3, v));
    for (ProcessId i = 1; i <= 3; ++i) {
      auto w = oracle::witness_search(p, s, ProcessSet::without(3, i), {});
      if (w.status == SearchStatus::Decided && w.witness->value == v) ++exact;
    }
  }
  double secs = seconds_since(t0);
  report(1, exact == 6 && secs < 5.0,
         "responsiveness: uniform-v witnesses exact " + std::to_string(exact) +
             "/6 in " + std::to_string(secs) + " s (< 5 s)");
}

void criterion_2_initialization() {
  auto t0 = std::chrono::steady_clock::now();
  UniformVote p(3);
  adversary::BivalentInit b = adversary::find_bivalent_init(p, {});
  bool ok = b.k >= 1;

  ok = ok && oracle::v_possible(p, b.state, 0, {}).verdict == Verdict::Yes;
  ok = ok && oracle::v_possible(p, b.state, 1, {}).verdict == Verdict::Yes;

  // independent oracle: the least ladder index admitting a 1-deciding
  // execution within depth 12, by plain exhaustive enumeration
  int brute_k = -1;
  for (int j = 0; j <= 3 && brute_k < 0; ++j) {
    if (enumerate_decides(p, ladder_init(p, j), ProcessSet::all(3), 1, 12)) {
      brute_k = j;
    }
  }
  ok = ok && b.k == brute_k;

  double secs = seconds_since(t0);
  ok = ok && secs < 60.0;
  report(2, ok,
         "initialization: k=" + std::to_string(b.k) + " (brute force " +
             std::to_string(brute_k) + "), both values possible, " +
             std::to_string(secs) + " s (< 60 s)");
}

void criterion_3_one_step() {
  UniformVote p(3);
  adversary::BivalentInit b = adversary::find_bivalent_init(p, {});
  int certified = 0;
  for (ProcessId i = 1; i <= 3; ++i) {
    // exercise the real constructions, not the already-bivalent shortcut
    adversary::ExtendResult walk = adversary::one_step_extend_program(
        p, b.state, b.fork, i, {}, nullptr, /*allow_trivial=*/false);
    if (oracle::certify_bivalent_via(p, walk.state, i, {}).fork) ++certified;

    adversary::ExtendResult chain = adversary::one_step_extend_fork(
        p, b.state, b.fork, i, {}, /*allow_trivial=*/false);
    if (oracle::certify_bivalent_via(p, chain.state, i, {}).fork) ++certified;
  }
  report(3, certified == 6,
         "one-step extensions certified bivalent via Q_i: " +
             std::to_string(certified) + "/6 (both variants, all i)");
}

std::string g_trace_a = "acceptance_attack_a.trace";
std::string g_trace_b = "acceptance_attack_b.trace";

void criterion_4_attack() {
  auto t0 = std::chrono::steady_clock::now();
  int code = run_cli("attack --protocol uniform-vote --n 3 --steps 10000 --out " +
                     g_trace_a);
  double secs = seconds_since(t0);
  bool ok = code == 0 && secs < 300.0;
  std::string detail = "attack 10000 steps: exit " + std::to_string(code) +
                       " in " + std::to_string(secs) + " s (< 300 s)";
  if (ok) {
    // every recorded state must be undecided and the round-robin exact;
    // re-execute the whole trace and check directly
    trace::TraceFile tf = trace::load_trace_file(g_trace_a);
    ok = tf.steps.size() == 10000;
    UniformVote p(3);
    GlobalState cur = make_initial(p, tf.header.init);
    size_t undecided = 0;
    bool fair = true;
    for (size_t k = 0; k < tf.steps.size() && ok; ++k) {
      if (tf.steps[k].turn != static_cast<ProcessId>(k % 3) + 1) fair = false;
      Schedule all = tf.steps[k].extension;
      if (tf.steps[k].applied) all.push_back(*tf.steps[k].applied);
      for (const Action& a : all) {
        cur = apply_action(p, cur, a);
        if (decision_summary(p, cur).any_decided) ok = false;
      }
      if (state_digest(cur) != tf.steps[k].digest) ok = false;
      ++undecided;
    }
    ok = ok && fair && undecided == 10000;
    // bivalence of the first 20 states, certified by the oracle
    if (ok) {
      GlobalState replayed = make_initial(p, tf.header.init);
      for (int k = 0; k < 20 && ok; ++k) {
        Schedule all = tf.steps[k].extension;
        if (tf.steps[k].applied) all.push_back(*tf.steps[k].applied);
        replayed = run_schedule(p, replayed, all).final_state;
        if (!oracle::certify_bivalent(p, replayed, {}).fork) ok = false;
      }
    }
    detail += ", 10000/10000 undecided, fairness exact, first 20 bivalent";
  }
  report(4, ok, detail);
}

void criterion_5_determinism() {
  int code = run_cli("attack --protocol uniform-vote --n 3 --steps 10000 --out " +
                     g_trace_b);
  bool ok = code == 0;
  if (ok) {
    std::string a = slurp(g_trace_a);
    std::string b = slurp(g_trace_b);
    ok = !a.empty() && a == b;
  }
  report(5, ok, "two identical attack invocations: byte-identical traces");
}

void criterion_6_commutativity() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  size_t pairs = 0;
  for (const char* name : {kFloodAll, kUniformVote}) {
    auto p = make_protocol(name, 2);
    verify::CommutativityReport r = verify::commutativity_exhaustive_n2(*p, 3);
    pairs += r.pairs_checked;
    ok = ok && r.ok();
  }
  UniformVote p3(3);
  verify::CommutativityReport trials =
      verify::commutativity_suite(p3, 100, 0xC0FFEE, 6);
  ok = ok && trials.ok() && trials.trials == 100;
  double secs = seconds_since(t0);
  ok = ok && secs < 60.0;
  report(6, ok,
         "commutativity: exhaustive n=2 sweep (" + std::to_string(pairs) +
             " pairs) and 100 seeded n=3 trials, zero counterexamples, " +
             std::to_string(secs) + " s (< 60 s)");
}

void criterion_7_blocking() {
  FloodAll fa(3);
  auto found = oracle::find_blocking(fa, {});
  bool ok = found.verdict == Verdict::Yes;
  if (ok) {
    GlobalState blocked =
        run_schedule(fa, make_initial(fa, found.init), found.path).final_state;
    ok = blocked == *found.state;
    // independent re-enumeration of the restricted closure
    ok = ok && !enumerate_closure_decides(
                   fa, blocked, ProcessSet::without(3, found.failed));
  }

  UniformVote uv(3);
  auto none = oracle::find_blocking(uv, {});
  ok = ok && none.verdict != Verdict::Yes;

  report(7, ok,
         std::string("blocking: wait-for-all pair certified and independently "
                     "re-enumerated; quorum vote: ") +
             (none.verdict == Verdict::No ? "none" : "unknown") +
             " within the default budget");
}

void criterion_8_agreement() {
  bool ok = true;
  for (int n : {2, 3}) {
    ConstantDecide p(n);
    for (uint32_t bits = 1; bits + 1 < (1u << n); ++bits) {
      InitVector iv(n, 0);
      for (int i = 0; i < n; ++i) iv[i] = (bits >> i) & 1;
      auto out = oracle::check_agreement_from(p, {iv}, {});
      if (out.verdict != Verdict::Yes ||
          out.violation->actions.size() > 1) {
        ok = false;
      }
    }
  }
  UniformVote uv(3);
  auto clean = oracle::check_agreement(uv, SearchBudget{12, 2'000'000});
  ok = ok && clean.verdict == Verdict::No && clean.complete_to_depth;
  report(8, ok,
         "agreement: every mixed constant init violates at depth <= 1; "
         "quorum vote clean to depth 12 (" +
             std::to_string(clean.states_visited) + " states)");
}

void criterion_9_witness_soundness() {
  UniformVote p(3);
  std::mt19937_64 rng(0xABCD);
  int sound = 0;
  for (int trial = 0; trial < 50; ++trial) {
    GlobalState s = random_reachable(p, rng, 6);
    ProcessId i = static_cast<ProcessId>(trial % 3) + 1;
    auto w = oracle::witness_search(p, s, ProcessSet::without(3, i),
                                    SearchBudget{16, 2'000'000});
    if (w.status != SearchStatus::Decided) continue;
    Execution rerun = run_schedule(p, s, w.witness->execution.actions);
    if (state_digest(rerun.final_state) == w.witness->end_digest &&
        p.decided(rerun.final_state.local(w.witness->decider)) ==
            w.witness->value) {
      ++sound;
    }
  }

  // v_possible versus unrestricted brute-force enumeration at n = 2
  bool agree = true;
  std::mt19937_64 rng2(0xBEEF);
  for (const char* name : {kUniformVote, kFloodAll, kConstantDecide}) {
    auto p2 = make_protocol(name, 2);
    for (int trial = 0; trial < 10; ++trial) {
      GlobalState s = random_reachable(*p2, rng2, 4);
      for (Bit v : {0, 1}) {
        auto got = oracle::v_possible(*p2, s, v, SearchBudget{6, 200'000});
        bool brute = false;
        for (ProcessId i = 1; i <= 2; ++i) {
          if (enumerate_decides(*p2, s, ProcessSet::without(2, i), v, 6)) {
            brute = true;
          }
        }
        if ((got.verdict == Verdict::Yes) != brute) agree = false;
      }
    }
  }

  report(9, sound == 50 && agree,
         "witness soundness: " + std::to_string(sound) +
             "/50 replays reproduce digest and decision; v_possible matches "
             "brute force at n=2 depth 6");
}

void criterion_10_trace_verification() {
  trace::TraceFile tf = trace::load_trace_file(g_trace_a);
  UniformVote p(3);
  verify::TraceCertificate clean = verify::verify_trace(tf, p, {}, 20);
  bool ok = clean.clean() && clean.steps_checked == 10000 &&
            clean.bivalence_certified_prefix == 20;

  trace::TraceFile mutated = tf;
  mutated.steps[1234].digest ^= 0x2;
  verify::TraceCertificate bad = verify::verify_trace(mutated, p, {}, 0);
  ok = ok && bad.violations.size() == 1 && bad.violations[0].step == 1234;

  report(10, ok,
         "trace verification: clean certificate on the attack trace; one "
         "mutated field yields exactly one violation at its step");
}

}  // namespace

int main() {
  std::printf("waffle acceptance suite\n");
  try {
    criterion_1_responsiveness();
    criterion_2_initialization();
    criterion_3_one_step();
    criterion_4_attack();
    criterion_5_determinism();
    criterion_6_commutativity();
    criterion_7_blocking();
    criterion_8_agreement();
    criterion_9_witness_soundness();
    criterion_10_trace_verification();
  } catch (const std::exception& e) {
    std::printf("FAIL  suite aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d/10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
