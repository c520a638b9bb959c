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

#include "waffle/verify.hpp"

#include <random>

namespace waffle::verify {

TraceCertificate verify_trace(const trace::TraceFile& t, const Protocol& p,
                              const oracle::SearchBudget& budget,
                              int certify_prefix) {
  if (p.name() != t.header.protocol || p.n() != t.header.n) {
    throw PreconditionError("trace header does not match the protocol");
  }

  TraceCertificate cert;
  GlobalState cur = make_initial(p, t.header.init);
  std::vector<GlobalState> turn_states;
  bool diverged = false;

  for (size_t k = 0; k < t.steps.size() && !diverged; ++k) {
    const trace::TraceStep& step = t.steps[k];
    if (step.index != k) {
      cert.violations.push_back({k, "step index out of sequence"});
      break;
    }
    ProcessId expected = static_cast<ProcessId>(k % p.n()) + 1;
    if (step.turn != expected) {
      cert.violations.push_back(
          {k, "turn process " + std::to_string(step.turn) +
                  " breaks the round-robin (expected " +
                  std::to_string(expected) + ")"});
      break;
    }

    Schedule actions = step.extension;
    if (step.applied) actions.push_back(*step.applied);
    if (!step.applied) {
      bool has_turn_action = false;
      for (const Action& a : step.extension) {
        if (a.process == step.turn) has_turn_action = true;
      }
      if (!has_turn_action) {
        cert.violations.push_back(
            {k, "turn has neither an applied action nor one in its extension"});
        break;
      }
    }

    for (const Action& a : actions) {
      if (!action_enabled(cur, a)) {
        cert.violations.push_back(
            {k, "recorded action " + waffle::to_string(a) + " is disabled"});
        diverged = true;
        break;
      }
      cur = apply_action(p, cur, a);
      if (decision_summary(p, cur).any_decided) {
        cert.violations.push_back({k, "a process decided during the step"});
        diverged = true;
        break;
      }
    }
    if (diverged) break;

    if (state_digest(cur) != step.digest) {
      cert.violations.push_back({k, "state digest mismatch"});
      break;
    }
    turn_states.push_back(cur);
    cert.steps_checked = k + 1;
  }

  cert.indecision_ok = cert.steps_checked == t.steps.size();
  cert.fairness_ok = cert.steps_checked == t.steps.size();

  size_t prefix = std::min<size_t>(certify_prefix, turn_states.size());
  for (size_t k = 0; k < prefix; ++k) {
    oracle::BivalenceOutcome bv =
        oracle::certify_bivalent(p, turn_states[k], budget);
    if (bv.fork) {
      ++cert.bivalence_certified_prefix;
    } else {
      cert.violations.push_back(
          {k, "bivalence certification failed for the step state"});
      break;
    }
  }

  if (!cert.violations.empty()) {
    cert.indecision_ok = false;
    cert.fairness_ok = false;
  }
  return cert;
}

InvariantVerdict check_program_invariants(const adversary::ProgramLog& log,
                                          const Protocol& p,
                                          const oracle::SearchBudget& budget) {
  InvariantVerdict verdict;
  auto fail = [&](const std::string& what) { verdict.failed.push_back(what); };

  std::vector<GlobalState> xs;
  try {
    xs = log.walked.states(p);
  } catch (const Error& e) {
    fail(std::string("I0: walked branch does not replay: ") + e.what());
    return verdict;
  }
  const int len = static_cast<int>(log.walked.actions.size());

  // I3: the walk starts beside the deciding end of the walked branch.
  if (log.steps.empty() || log.steps.front().position != len - 1) {
    fail("I3: walk did not start at the deciding end");
  }

  ProcessSet qi = ProcessSet::without(p.n(), log.i);

  for (const adversary::ProgramLogStep& step : log.steps) {
    if (step.position < 0 || step.position >= len) {
      fail("I0: logged position out of range");
      continue;
    }
    // I0: S and S' really are adjacent states of the walked branch.
    if (state_digest(xs[step.position]) != step.s_digest ||
        state_digest(xs[step.position + 1]) != step.s_prime_digest) {
      fail("I0: position " + std::to_string(step.position) +
           " does not match the walked branch");
    }

    // I1: the maintained path avoids the i process and reaches the walk
    // value from S'.
    bool i_free = true;
    for (const Action& a : step.path) {
      if (a.process == log.i) i_free = false;
    }
    if (!i_free) {
      fail("I1: path at position " + std::to_string(step.position) +
           " contains an action of the i process");
    } else {
      try {
        Execution run = run_schedule(p, xs[step.position + 1], step.path);
        DecisionSummary sum = decision_summary(p, run.final_state);
        if (!sum.any_decided || sum.conflict ||
            *sum.value != log.walk_value) {
          fail("I1: path at position " + std::to_string(step.position) +
               " does not decide the walk value");
        }
      } catch (const Error&) {
        fail("I1: path at position " + std::to_string(step.position) +
             " is not applicable from S'");
      }
    }

    // I2: re-run the witness rather than trusting the log. Advanced
    // positions must not have admitted the flipped value.
    oracle::WitnessOutcome w =
        oracle::witness_search(p, xs[step.position], qi, budget);
    if (w.status != oracle::SearchStatus::Decided) {
      fail("I2: witness at position " + std::to_string(step.position) +
           " did not decide on re-run");
    } else if (w.witness->value != step.wt_value) {
      fail("I2: witness value at position " + std::to_string(step.position) +
           " does not reproduce");
    } else if (step.advanced && w.witness->value != log.walk_value) {
      fail("I2: walk advanced past a position whose witness had flipped");
    }
  }
  return verdict;
}

namespace {

/// Uniformly random schedule of up to max_len actions of processes in `among`,
/// enabled from s by construction.
Schedule random_restricted_schedule(const Protocol& p, const GlobalState& s,
                                    const ProcessSet& among, int max_len,
                                    std::mt19937_64& rng) {
  Schedule out;
  GlobalState cur = s;
  int len = static_cast<int>(rng() % (max_len + 1));
  for (int i = 0; i < len; ++i) {
    std::vector<Action> options;
    for (ProcessId r : among.ids()) {
      for (ProcessId snd = 1; snd <= p.n(); ++snd) {
        if (snd != r && !cur.channel(snd, r).empty()) {
          options.push_back(Action::deliver(r, snd));
        }
      }
      options.push_back(Action::null_step(r));
    }
    const Action& a = options[rng() % options.size()];
    cur = apply_action(p, cur, a);
    out.push_back(a);
  }
  return out;
}

void enumerate_restricted(const Protocol& p, const GlobalState& s,
                          ProcessId only, int max_len, Schedule& prefix,
                          std::vector<Schedule>& out) {
  out.push_back(prefix);
  if (static_cast<int>(prefix.size()) >= max_len) return;
  std::vector<Action> options;
  for (ProcessId snd = 1; snd <= p.n(); ++snd) {
    if (snd != only && !s.channel(snd, only).empty()) {
      options.push_back(Action::deliver(only, snd));
    }
  }
  options.push_back(Action::null_step(only));
  for (const Action& a : options) {
    GlobalState next = apply_action(p, s, a);
    prefix.push_back(a);
    enumerate_restricted(p, next, only, max_len, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

CommutativityReport commutativity_suite(const Protocol& p, size_t trials,
                                        uint64_t seed, int depth) {
  CommutativityReport report;
  std::mt19937_64 rng(seed);
  const int n = p.n();

  for (size_t trial = 0; trial < trials; ++trial) {
    InitVector iv(n, 0);
    for (int i = 0; i < n; ++i) iv[i] = static_cast<Bit>(rng() % 2);
    GlobalState s = make_initial(p, iv);

    int walk = static_cast<int>(rng() % (depth + 1));
    for (int i = 0; i < walk; ++i) {
      std::vector<Action> acts = enabled_actions(s);
      s = apply_action(p, s, acts[rng() % acts.size()]);
    }

    // Nonempty proper subset and its complement.
    uint32_t full = (1u << n) - 1u;
    uint32_t mask = 1u + rng() % (full - 1u);
    ProcessSet a{n, mask};
    ProcessSet b{n, full & ~mask};

    Schedule sigma1 = random_restricted_schedule(p, s, a, depth, rng);
    Schedule sigma2 = random_restricted_schedule(p, s, b, depth, rng);

    ++report.trials;
    ++report.pairs_checked;
    try {
      commute_join(p, s, sigma1, sigma2);
    } catch (const Error& e) {
      report.counterexamples.push_back(
          "trial " + std::to_string(trial) + ": " + e.what() + " [init " +
          waffle::to_string(iv) + " s1 " + waffle::to_string(sigma1) + " s2 " +
          waffle::to_string(sigma2) + "]");
    }
  }
  return report;
}

CommutativityReport commutativity_exhaustive_n2(const Protocol& p, int depth) {
  if (p.n() != 2) {
    throw PreconditionError("exhaustive sweep is defined for n = 2");
  }
  CommutativityReport report;

  for (uint32_t bits = 0; bits < 4; ++bits) {
    InitVector iv{static_cast<Bit>(bits & 1), static_cast<Bit>((bits >> 1) & 1)};
    GlobalState root = make_initial(p, iv);

    // States reachable within two steps keep the sweep small while still
    // covering mid-flight channel contents.
    std::vector<GlobalState> states{root};
    for (const Action& a : enabled_actions(root)) {
      GlobalState s1 = apply_action(p, root, a);
      states.push_back(s1);
      for (const Action& b : enabled_actions(s1)) {
        states.push_back(apply_action(p, s1, b));
      }
    }

    for (const GlobalState& s : states) {
      std::vector<Schedule> of1, of2;
      Schedule prefix;
      enumerate_restricted(p, s, 1, depth, prefix, of1);
      enumerate_restricted(p, s, 2, depth, prefix, of2);
      for (const Schedule& s1 : of1) {
        for (const Schedule& s2 : of2) {
          ++report.pairs_checked;
          try {
            commute_join(p, s, s1, s2);
          } catch (const Error& e) {
            report.counterexamples.push_back(
                std::string("init ") + waffle::to_string(iv) + ": " +
                e.what() + " [s1 " + waffle::to_string(s1) + " s2 " +
                waffle::to_string(s2) + "]");
          }
        }
      }
    }
  }
  return report;
}

}  // namespace waffle::verify
