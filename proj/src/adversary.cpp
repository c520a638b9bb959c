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

#include "waffle/adversary.hpp"

#include <algorithm>

namespace waffle::adversary {

namespace {

using oracle::SearchStatus;
using oracle::WitnessOutcome;
using oracle::WitnessResult;

const WitnessResult& require_decided(const WitnessOutcome& out,
                                     const std::string& what) {
  if (out.status == SearchStatus::Decided) return *out.witness;
  if (out.status == SearchStatus::ClosedNoDecision) {
    throw OracleExhaustedError(
        what + ": witness search certified no decision (protocol is not "
               "effectively nonblocking here)",
        0);
  }
  throw OracleExhaustedError(what + ": witness search ran out of budget", 0);
}

Bit branch_value(const Protocol& p, const Execution& e) {
  DecisionSummary sum = decision_summary(p, e.final_state);
  if (!sum.any_decided || sum.conflict) {
    throw Error("execution does not end in a cleanly deciding state");
  }
  return *sum.value;
}

void check_decides(const Protocol& p, const Execution& e, Bit expect,
                   const char* what) {
  DecisionSummary sum = decision_summary(p, e.final_state);
  if (!sum.any_decided || sum.conflict || *sum.value != expect) {
    throw CommutationError(std::string(what) + ": carried path decides " +
                           (sum.any_decided ? std::to_string(*sum.value)
                                            : std::string("nothing")) +
                           ", expected " + std::to_string(expect));
  }
}

}  // namespace

BivalentInit find_bivalent_init(const Protocol& p,
                                const SearchBudget& budget) {
  const int n = p.n();
  if (n <= 1) {
    throw PreconditionError("bivalent initialization needs n > 1");
  }

  // Responsiveness first: both uniform initializations must drive every
  // witness to their own value.
  std::vector<std::vector<WitnessOutcome>> rungs(n + 1);
  auto rung_witnesses = [&](int j) -> std::vector<WitnessOutcome>& {
    if (rungs[j].empty()) {
      GlobalState s = ladder_init(p, j);
      rungs[j].reserve(n);
      for (ProcessId i = 1; i <= n; ++i) {
        rungs[j].push_back(
            oracle::witness_search(p, s, ProcessSet::without(n, i), budget));
      }
    }
    return rungs[j];
  };

  for (int j : {0, n}) {
    Bit uniform = j == 0 ? 0 : 1;
    auto& ws = rung_witnesses(j);
    for (ProcessId i = 1; i <= n; ++i) {
      const WitnessResult& w =
          require_decided(ws[i - 1], "responsiveness check");
      if (w.value != uniform) {
        throw NotResponsiveError(
            "uniform-" + std::to_string(uniform) + " initialization decided " +
            std::to_string(w.value) + " under Q_" + std::to_string(i));
      }
    }
  }

  // Walk the ladder, increasing the rung after trying all subsets, for the
  // least k whose witnesses produce a 1.
  int k = -1;
  ProcessId m1 = 0;
  for (int j = 0; j <= n && k < 0; ++j) {
    auto& ws = rung_witnesses(j);
    for (ProcessId i = 1; i <= n; ++i) {
      const WitnessResult& w = require_decided(
          ws[i - 1], "ladder walk at rung " + std::to_string(j));
      if (w.value == 1) {
        k = j;
        m1 = i;
        break;
      }
    }
  }
  if (k < 1) {
    throw Error("ladder produced no 1-deciding rung above 0; responsiveness "
                "check should have caught this");
  }

  GlobalState b0 = ladder_init(p, k);

  // The previous rung's 0-witness avoiding process k replays at s_k: to the
  // participants the run looks like one where k was initialized to 0.
  const WitnessResult& alpha0 = require_decided(
      rung_witnesses(k - 1)[k - 1], "zero witness at rung k-1");
  if (alpha0.value != 0) {
    throw Error("witness below the pivot rung decided 1; k is not minimal");
  }
  Execution zero_replay = replay(p, alpha0.execution.actions, b0);
  DecisionSummary replay_sum = decision_summary(p, zero_replay.final_state);
  bool replay_zero =
      replay_sum.any_decided && !replay_sum.conflict && *replay_sum.value == 0;

  // Prefer a direct 0-witness at s_k; otherwise use the replay; as a last
  // resort certify by unrestricted search (the replay can diverge when it
  // consumed messages whose payload depends on process k's input).
  std::optional<Execution> zero_exec;
  ZeroRoute route = ZeroRoute::DirectWitness;
  for (ProcessId i = 1; i <= n && !zero_exec; ++i) {
    const WitnessOutcome& wo = rung_witnesses(k)[i - 1];
    if (wo.status == SearchStatus::Decided && wo.witness->value == 0) {
      zero_exec = wo.witness->execution;
    }
  }
  if (!zero_exec) {
    if (replay_zero) {
      zero_exec = zero_replay;
      route = ZeroRoute::Replay;
    } else {
      oracle::BivalenceOutcome bv = oracle::certify_bivalent(p, b0, budget);
      if (!bv.zero_exec) {
        throw OracleExhaustedError(
            "pivot rung admits no 0-deciding execution within budget", 0);
      }
      zero_exec = bv.zero_exec;
      route = ZeroRoute::CertifySearch;
    }
  }

  BivalentInit out;
  out.state = b0;
  out.k = k;
  out.fork = Fork{b0, rung_witnesses(k)[m1 - 1].witness->execution,
                  std::move(*zero_exec), 1};
  out.zero_replay = std::move(zero_replay);
  out.replay_decides_zero = replay_zero;
  out.route = route;
  oracle::validate_fork(p, out.fork);
  return out;
}

namespace {

/// The trivial case of the one-step extension: if b is already bivalent via
/// Q_i, a restricted bivalence search certifies it and b' = b with no
/// extension.
std::optional<ExtendResult> trivial_extension(const Protocol& p,
                                              const GlobalState& b,
                                              ProcessId i,
                                              const SearchBudget& budget) {
  oracle::BivalenceOutcome bv = oracle::certify_bivalent_via(p, b, i, budget);
  if (!bv.fork) return std::nullopt;
  return ExtendResult{b, std::move(*bv.fork), {}};
}

}  // namespace

ExtendResult one_step_extend_program(const Protocol& p, const GlobalState& b,
                                     const Fork& fork, ProcessId i,
                                     const SearchBudget& budget,
                                     ProgramLog* log, bool allow_trivial) {
  if (!(fork.origin == b)) {
    throw PreconditionError("fork does not certify the given state");
  }
  if (allow_trivial) {
    if (auto done = trivial_extension(p, b, i, budget)) {
      if (log) {
        log->i = i;
        log->steps.clear();
        log->trivial = true;
      }
      return std::move(*done);
    }
  }
  const int n = p.n();
  ProcessSet qi = ProcessSet::without(n, i);

  WitnessOutcome at_b = oracle::witness_search(p, b, qi, budget);
  const WitnessResult& wit_b = require_decided(at_b, "one-step at b");
  const Bit w = wit_b.value;
  const Bit opp = 1 - w;

  // Walk backward along the branch that decides the opposite of the witness
  // value at b.
  const Execution& walked = fork.alpha_value == opp ? fork.alpha : fork.beta;
  std::vector<GlobalState> xs = walked.states(p);
  const int len = static_cast<int>(walked.actions.size());
  if (len == 0) {
    throw PreconditionError("fork branch is empty; origin already decides");
  }

  if (log) {
    log->i = i;
    log->walk_value = opp;
    log->walked = walked;
    log->steps.clear();
    log->exit_position = -1;
    log->trivial = false;
  }

  Schedule path;  // Q_i path from xs[pos + 1] to an opp-deciding state

  WitnessOutcome walk_out;
  for (int pos = len - 1; pos >= 0; --pos) {
    const GlobalState& s = xs[pos];
    const Action& act = walked.actions[pos];

    // At pos == 0 this would recompute the witness at b; reuse it instead.
    const WitnessResult* wit_at = &wit_b;
    if (pos != 0) {
      walk_out = oracle::witness_search(p, s, qi, budget);
      wit_at = &require_decided(walk_out, "one-step walk");
    }
    const WitnessResult& wit = *wit_at;

    if (log) {
      log->steps.push_back(ProgramLogStep{pos, state_digest(s),
                                          state_digest(xs[pos + 1]), act, path,
                                          wit.value, wit.value == opp});
    }

    if (wit.value == opp) {
      // Keep a Q_i path to the walk value and move one step toward b.
      if (act.process == i) {
        path = wit.execution.actions;
      } else {
        path.insert(path.begin(), act);
      }
      continue;
    }

    // The witness flipped: this position closes the construction.
    if (log) {
      log->exit_position = pos;
      log->exit_case = act.process == i ? 1 : 0;
    }
    if (act.process == i) {
      // Carry the witness path past the i action onto xs[pos + 1].
      Execution moved;
      try {
        moved = replay(p, wit.execution.actions, xs[pos + 1]);
      } catch (const ReplayError&) {
        throw CommutationError(
            "witness path could not be replayed past an i action");
      }
      check_decides(p, moved, w, "one-step i-exit");
      Execution kept = run_schedule(p, xs[pos + 1], path);
      check_decides(p, kept, opp, "one-step i-exit kept path");
      Fork full{xs[pos + 1], std::move(kept), std::move(moved), opp};
      Schedule extension(walked.actions.begin(),
                         walked.actions.begin() + pos + 1);
      return ExtendResult{xs[pos + 1], std::move(full), std::move(extension)};
    }
    Schedule kept_sched = path;
    kept_sched.insert(kept_sched.begin(), act);
    Execution kept = run_schedule(p, s, kept_sched);
    check_decides(p, kept, opp, "one-step exit kept path");
    Fork full{s, std::move(kept), wit.execution, opp};
    Schedule extension(walked.actions.begin(), walked.actions.begin() + pos);
    return ExtendResult{s, std::move(full), std::move(extension)};
  }

  throw Error("one-step walk passed the fork origin; the witness at b "
              "contradicted itself");
}

ForkModifyOutcome fork_modify(const Protocol& p, const Fork& phi, ProcessId i,
                              const SearchBudget& budget) {
  const int m = oracle::i_len(phi, i);
  if (m == 0) {
    throw PreconditionError("fork_modify requires i_len > 0 (already full)");
  }
  for (const Action& a : phi.beta.actions) {
    if (a.process == i) {
      throw PreconditionError("beta branch of an i-fork must avoid the i "
                              "process");
    }
  }
  const int n = p.n();

  int last = -1;
  for (int idx = 0; idx < static_cast<int>(phi.alpha.actions.size()); ++idx) {
    if (phi.alpha.actions[idx].process == i) last = idx;
  }
  std::vector<GlobalState> xs = phi.alpha.states(p);
  const GlobalState& before = xs[last];      // s_{m-1}
  const GlobalState& after = xs[last + 1];   // s_m

  WitnessOutcome wout =
      oracle::witness_search(p, before, ProcessSet::without(n, i), budget);
  const WitnessResult& wit = require_decided(wout, "fork_modify witness");
  const Bit beta_value = 1 - phi.alpha_value;

  if (wit.value == beta_value) {
    // Case 1: the parallelogram commutes; a full i-fork lives at s_m.
    Execution carried;
    try {
      carried = replay(p, wit.execution.actions, after);
    } catch (const ReplayError&) {
      throw CommutationError("fork_modify: witness path does not carry past "
                             "the last i action");
    }
    check_decides(p, carried, beta_value, "fork_modify case 1");
    Schedule eps(phi.alpha.actions.begin() + last + 1,
                 phi.alpha.actions.end());
    Execution rest = run_schedule(p, after, eps);
    check_decides(p, rest, phi.alpha_value, "fork_modify case 1 suffix");

    ForkModifyOutcome out;
    out.full = true;
    out.fork = Fork{after, std::move(rest), std::move(carried),
                    phi.alpha_value};
    out.hop.assign(phi.alpha.actions.begin(),
                   phi.alpha.actions.begin() + last + 1);
    return out;
  }

  // Case 2: splice the witness path into alpha; the i measure strictly drops.
  Schedule delta(phi.alpha.actions.begin(), phi.alpha.actions.begin() + last);
  Schedule combined = delta;
  combined.insert(combined.end(), wit.execution.actions.begin(),
                  wit.execution.actions.end());
  Execution alpha2 = run_schedule(p, phi.origin, combined);
  check_decides(p, alpha2, phi.alpha_value, "fork_modify case 2");

  ForkModifyOutcome out;
  out.fork = Fork{phi.origin, std::move(alpha2), phi.beta, phi.alpha_value};
  if (oracle::i_len(out.fork, i) >= m) {
    throw Error("fork_modify case 2 failed to decrease the i measure");
  }
  return out;
}

ExtendResult one_step_extend_fork(const Protocol& p, const GlobalState& b,
                                  const Fork& fork, ProcessId i,
                                  const SearchBudget& budget,
                                  bool allow_trivial) {
  if (!(fork.origin == b)) {
    throw PreconditionError("fork does not certify the given state");
  }
  if (allow_trivial) {
    if (auto done = trivial_extension(p, b, i, budget)) return std::move(*done);
  }
  const int n = p.n();

  WitnessOutcome at_b =
      oracle::witness_search(p, b, ProcessSet::without(n, i), budget);
  const WitnessResult& wit = require_decided(at_b, "one-step(fork) at b");
  const Bit w = wit.value;

  // The witness path is i-free, so pairing it with the fork branch of the
  // opposite value yields an i-fork.
  const Execution& opposing = fork.alpha_value == 1 - w ? fork.alpha
                                                        : fork.beta;
  if (branch_value(p, opposing) != 1 - w) {
    throw Error("fork does not provide a branch opposing the witness value");
  }
  Fork phi{b, opposing, wit.execution, 1 - w};

  while (oracle::i_len(phi, i) > 0) {
    ForkModifyOutcome step = fork_modify(p, phi, i, budget);
    if (step.full) {
      return ExtendResult{step.fork.origin, step.fork, std::move(step.hop)};
    }
    phi = std::move(step.fork);
  }
  return ExtendResult{b, std::move(phi), {}};
}

std::string to_string(Variant v) {
  return v == Variant::Program ? "program" : "fork";
}

std::optional<Variant> parse_variant(const std::string& text) {
  if (text == "program") return Variant::Program;
  if (text == "fork") return Variant::ForkChain;
  return std::nullopt;
}

std::string to_string(ForkMode m) {
  switch (m) {
    case ForkMode::Commuted: return "commute";
    case ForkMode::Recertified: return "recert";
    case ForkMode::Served: return "served";
  }
  return "?";
}

IndecisiveExecution::IndecisiveExecution(
    std::shared_ptr<const Protocol> protocol, const SearchBudget& budget,
    Variant variant, bool run_gates)
    : protocol_(std::move(protocol)), budget_(budget), variant_(variant) {
  if (protocol_->n() <= 1) {
    throw PreconditionError("attack needs n > 1");
  }
  if (run_gates) {
    // Budget-bounded agreement gate; responsiveness is checked inside the
    // bivalent-initialization search.
    SearchBudget gate{std::min(budget_.max_depth, 6),
                      std::min<size_t>(budget_.max_states, 200'000)};
    oracle::AgreementOutcome agr = oracle::check_agreement(*protocol_, gate);
    if (agr.verdict == oracle::Verdict::Yes) {
      throw AgreementGateError(
          "protocol violates agreement from initialization " +
          waffle::to_string(agr.init) + "; refusing to attack");
    }
  }
  binit_ = find_bivalent_init(*protocol_, budget_);
  current_ = binit_.state;
  fork_ = binit_.fork;
}

const TurnRecord& IndecisiveExecution::turn(size_t k) {
  while (turns_.size() <= k) advance();
  return turns_[k];
}

const GlobalState& IndecisiveExecution::state_after_turn(size_t k) {
  turn(k);
  return states_[k];
}

std::pair<Action, GlobalState> IndecisiveExecution::nth_step(size_t k) {
  const TurnRecord& rec = turn(k);
  if (rec.applied) return {*rec.applied, states_[k]};
  for (auto it = rec.extension.rbegin(); it != rec.extension.rend(); ++it) {
    if (it->process == rec.turn) return {*it, states_[k]};
  }
  throw Error("turn served without an action of the turn process");
}

void IndecisiveExecution::advance() {
  const Protocol& p = *protocol_;
  const size_t t = turns_.size();
  const size_t round = t / p.n();
  const ProcessId i = static_cast<ProcessId>(t % p.n()) + 1;

  ExtendResult ext;
  try {
    ext = variant_ == Variant::Program
              ? one_step_extend_program(p, current_, fork_, i, budget_)
              : one_step_extend_fork(p, current_, fork_, i, budget_);
  } catch (const OracleExhaustedError& e) {
    throw OracleExhaustedError(std::string(e.what()) + " (round " +
                                   std::to_string(round) + ", turn " +
                                   std::to_string(t) + ")",
                               round);
  }

  // Indecision is asserted on every intermediate state, not sampled.
  GlobalState cur = current_;
  for (size_t idx = 0; idx < ext.extension.size(); ++idx) {
    cur = apply_action(p, cur, ext.extension[idx], idx);
    if (decision_summary(p, cur).any_decided) {
      throw Error("extension reached a decided state at turn " +
                  std::to_string(t));
    }
    history_.emplace_back(ext.extension[idx], state_digest(cur));
  }
  if (!(cur == ext.state)) {
    throw Error("extension path does not reproduce the extended state");
  }

  bool served = false;
  for (const Action& a : ext.extension) {
    if (a.process == i) served = true;
  }

  TurnRecord rec;
  rec.index = t;
  rec.turn = i;
  rec.extension = std::move(ext.extension);

  if (served) {
    current_ = std::move(ext.state);
    fork_ = std::move(ext.fork);
    rec.mode = ForkMode::Served;
  } else {
    // Canonical least enabled action of the turn process.
    Action a = Action::null_step(i);
    for (ProcessId snd = 1; snd <= p.n(); ++snd) {
      if (snd != i && !ext.state.channel(snd, i).empty()) {
        a = Action::deliver(i, snd);
        break;
      }
    }
    GlobalState next = apply_action(p, ext.state, a);
    if (decision_summary(p, next).any_decided) {
      throw Error("turn action reached a decided state at turn " +
                  std::to_string(t));
    }
    history_.emplace_back(a, state_digest(next));
    // The full i-fork commutes past the i action; fall back to a fresh
    // certification if it will not carry.
    try {
      Execution alpha2 = replay(p, ext.fork.alpha.actions, next);
      check_decides(p, alpha2, ext.fork.alpha_value, "turn fork alpha");
      Execution beta2 = replay(p, ext.fork.beta.actions, next);
      check_decides(p, beta2, 1 - ext.fork.alpha_value, "turn fork beta");
      fork_ = Fork{next, std::move(alpha2), std::move(beta2),
                   ext.fork.alpha_value};
      rec.mode = ForkMode::Commuted;
    } catch (const Error&) {
      oracle::BivalenceOutcome bv =
          oracle::certify_bivalent_via(p, next, i, budget_);
      if (!bv.fork) {
        throw OracleExhaustedError(
            "re-certification after the turn action failed (round " +
                std::to_string(round) + ")",
            round);
      }
      fork_ = std::move(*bv.fork);
      rec.mode = ForkMode::Recertified;
    }
    current_ = std::move(next);
    rec.applied = a;
  }

  rec.digest_after = state_digest(current_);
  states_.push_back(current_);
  turns_.push_back(std::move(rec));
}

}  // namespace waffle::adversary
