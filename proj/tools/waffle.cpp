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

// Command-line driver. Exit code contract: 0 definitive success, 1 usage
// error, 2 unknown / budget exhausted, 3 certified negative (e.g. a blocked
// witness search or a failed trace verification).

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "waffle/adversary.hpp"
#include "waffle/model.hpp"
#include "waffle/oracle.hpp"
#include "waffle/protocols.hpp"
#include "waffle/trace.hpp"
#include "waffle/verify.hpp"

namespace {

using json = nlohmann::json;
using namespace waffle;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitCertifiedNegative = 3;

struct CommonOpts {
  std::string protocol = kUniformVote;
  int n = 3;
  int budget_depth = 12;
  size_t budget_states = 2'000'000;
  bool json_output = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_json = true) {
  cmd->add_option("--protocol", o.protocol, "protocol name")
      ->check(CLI::IsMember(builtin_protocol_names()));
  cmd->add_option("--n", o.n, "process count");
  cmd->add_option("--budget-depth", o.budget_depth, "search depth budget");
  cmd->add_option("--budget-states", o.budget_states, "visited state budget");
  if (with_json) cmd->add_flag("--json", o.json_output, "machine output");
}

oracle::SearchBudget budget_of(const CommonOpts& o) {
  return oracle::SearchBudget{o.budget_depth, o.budget_states};
}

int cmd_attack(const CommonOpts& o, int steps, const std::string& variant_name,
               int certify_prefix, const std::string& out_path) {
  auto variant = adversary::parse_variant(variant_name);
  if (!variant) {
    std::cerr << "error: unknown variant '" << variant_name << "'\n";
    return kExitUsage;
  }
  if (o.n <= 1) {
    std::cerr << "error: attack needs --n > 1\n";
    return kExitUsage;
  }
  if (steps < 1) {
    std::cerr << "error: --steps must be positive\n";
    return kExitUsage;
  }

  auto protocol = make_protocol(o.protocol, o.n);
  adversary::IndecisiveExecution run(protocol, budget_of(o), *variant);

  trace::TraceFile tf;
  tf.header.digest_algo = kDigestAlgo;
  tf.header.digest_version = kDigestVersion;
  tf.header.protocol = o.protocol;
  tf.header.n = o.n;
  tf.header.t = 1;
  tf.header.variant = adversary::to_string(*variant);
  tf.header.budget_depth = o.budget_depth;
  tf.header.budget_states = o.budget_states;
  tf.header.certify_prefix = certify_prefix;
  tf.header.init = ladder_vector(o.n, run.init_info().k);

  for (int k = 0; k < steps; ++k) {
    const adversary::TurnRecord& rec = run.turn(k);
    trace::TraceStep step;
    step.index = rec.index;
    step.turn = rec.turn;
    step.extension = rec.extension;
    step.applied = rec.applied;
    step.mode = adversary::to_string(rec.mode);
    step.digest = rec.digest_after;
    tf.steps.push_back(std::move(step));
    switch (rec.mode) {
      case adversary::ForkMode::Served: tf.footer.served++; break;
      case adversary::ForkMode::Commuted: tf.footer.commuted++; break;
      case adversary::ForkMode::Recertified: tf.footer.recertified++; break;
    }
    tf.footer.total_actions += rec.extension.size() + (rec.applied ? 1 : 0);
  }
  tf.footer.rounds = static_cast<size_t>(steps) / o.n;

  size_t certified = 0;
  int prefix = std::min<int>(certify_prefix, steps);
  for (int k = 0; k < prefix; ++k) {
    oracle::BivalenceOutcome bv = oracle::certify_bivalent(
        *protocol, run.state_after_turn(k), budget_of(o));
    if (!bv.fork) {
      std::cerr << "error: bivalence certification failed at step " << k
                << "\n";
      return kExitUnknown;
    }
    ++certified;
  }

  if (!out_path.empty()) trace::save_trace_file(out_path, tf);

  std::cout << "attack: " << steps << " indecisive steps of " << o.protocol
            << " n=" << o.n << " (variant " << tf.header.variant << ")\n"
            << "  bivalent init: ladder index k=" << run.init_info().k << "\n"
            << "  rounds completed: " << tf.footer.rounds << "\n"
            << "  certified bivalent prefix: " << certified << "\n"
            << "  fork modes: served=" << tf.footer.served
            << " commute=" << tf.footer.commuted
            << " recert=" << tf.footer.recertified << "\n";
  if (!out_path.empty()) std::cout << "  trace: " << out_path << "\n";
  return kExitOk;
}

int cmd_witness(const CommonOpts& o, const std::string& init_text,
                int exclude) {
  auto iv = parse_init_vector(init_text);
  if (!iv || static_cast<int>(iv->size()) != o.n) {
    std::cerr << "error: --init must be a bitstring of length " << o.n << "\n";
    return kExitUsage;
  }
  if (exclude < 1 || exclude > o.n) {
    std::cerr << "error: --exclude must name a process in 1.." << o.n << "\n";
    return kExitUsage;
  }
  auto protocol = make_protocol(o.protocol, o.n);
  GlobalState s = make_initial(*protocol, *iv);
  oracle::WitnessOutcome w = oracle::witness_search(
      *protocol, s, ProcessSet::without(o.n, exclude), budget_of(o));

  if (w.status == oracle::SearchStatus::Decided) {
    std::cout << "witness: process " << w.witness->decider << " decides "
              << w.witness->value << "\n"
              << "  schedule: " << to_string(w.witness->execution.actions)
              << "\n"
              << "  end digest: " << digest_hex(w.witness->end_digest) << "\n"
              << "  states visited: " << w.states_visited << "\n";
    return kExitOk;
  }
  if (w.status == oracle::SearchStatus::ClosedNoDecision) {
    std::cout << "blocked: full closure of Q_" << exclude << " explored ("
              << w.states_visited << " states), no process can decide\n";
    return kExitCertifiedNegative;
  }
  std::cout << "unknown: budget exhausted after " << w.states_visited
            << " states\n";
  return kExitUnknown;
}

int cmd_blocking(const CommonOpts& o) {
  auto protocol = make_protocol(o.protocol, o.n);
  oracle::BlockingOutcome out = oracle::find_blocking(*protocol, budget_of(o));

  if (o.json_output) {
    json j;
    j["verdict"] = out.verdict == oracle::Verdict::Yes  ? "blocking"
                   : out.verdict == oracle::Verdict::No ? "none"
                                                        : "unknown";
    j["states_visited"] = out.states_visited;
    if (out.verdict == oracle::Verdict::Yes) {
      j["failed_process"] = out.failed;
      j["init"] = to_string(out.init);
      j["path"] = to_string(out.path);
      j["state_digest"] = digest_hex(state_digest(*out.state));
    }
    std::cout << j.dump(2) << "\n";
  } else if (out.verdict == oracle::Verdict::Yes) {
    std::cout << "blocking pair found: failing process " << out.failed
              << " from init " << to_string(out.init) << " via "
              << to_string(out.path) << "\n"
              << "  blocked state digest: "
              << digest_hex(state_digest(*out.state)) << "\n";
  } else if (out.verdict == oracle::Verdict::No) {
    std::cout << "no blocking state: reachable space exhausted ("
              << out.states_visited << " states)\n";
  } else {
    std::cout << "unknown: budget exhausted after " << out.states_visited
              << " states\n";
  }
  return out.verdict == oracle::Verdict::Unknown ? kExitUnknown : kExitOk;
}

int cmd_agreement(const CommonOpts& o) {
  auto protocol = make_protocol(o.protocol, o.n);
  oracle::AgreementOutcome out =
      oracle::check_agreement(*protocol, budget_of(o));

  if (o.json_output) {
    json j;
    j["verdict"] = out.verdict == oracle::Verdict::Yes  ? "violation"
                   : out.verdict == oracle::Verdict::No ? "clean"
                                                        : "unknown";
    j["states_visited"] = out.states_visited;
    if (out.violation) {
      j["init"] = to_string(out.init);
      j["schedule"] = to_string(out.violation->actions);
    }
    std::cout << j.dump(2) << "\n";
  } else if (out.verdict == oracle::Verdict::Yes) {
    std::cout << "agreement violation from init " << to_string(out.init)
              << " via " << to_string(out.violation->actions) << "\n";
  } else if (out.verdict == oracle::Verdict::No) {
    std::cout << "no violation to depth " << o.budget_depth << " ("
              << out.states_visited << " states)\n";
  } else {
    std::cout << "unknown: budget exhausted after " << out.states_visited
              << " states\n";
  }
  return out.verdict == oracle::Verdict::Unknown ? kExitUnknown : kExitOk;
}

int cmd_init_search(const CommonOpts& o) {
  if (o.n <= 1) {
    std::cerr << "error: init-search needs --n > 1\n";
    return kExitUsage;
  }
  auto protocol = make_protocol(o.protocol, o.n);
  adversary::BivalentInit b =
      adversary::find_bivalent_init(*protocol, budget_of(o));

  const char* route = b.route == adversary::ZeroRoute::DirectWitness
                          ? "direct-witness"
                          : b.route == adversary::ZeroRoute::Replay
                                ? "replay"
                                : "certify-search";
  if (o.json_output) {
    json j;
    j["k"] = b.k;
    j["state_digest"] = digest_hex(state_digest(b.state));
    j["zero_route"] = route;
    j["replay_decides_zero"] = b.replay_decides_zero;
    j["fork"] = {{"alpha", to_string(b.fork.alpha.actions)},
                 {"alpha_value", b.fork.alpha_value},
                 {"beta", to_string(b.fork.beta.actions)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "bivalent initial state at ladder index k=" << b.k << " ("
              << to_string(ladder_vector(o.n, b.k)) << ")\n"
              << "  digest: " << digest_hex(state_digest(b.state)) << "\n"
              << "  1-branch: " << to_string(b.fork.alpha.actions) << "\n"
              << "  0-branch: " << to_string(b.fork.beta.actions) << " (via "
              << route << ")\n"
              << "  replay of the 0-witness decides 0: "
              << (b.replay_decides_zero ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

int cmd_verify(const std::string& trace_path, int budget_depth,
               size_t budget_states, int certify_prefix, bool json_output) {
  trace::TraceFile tf = trace::load_trace_file(trace_path);
  auto protocol = make_protocol(tf.header.protocol, tf.header.n);
  int prefix = certify_prefix >= 0 ? certify_prefix : tf.header.certify_prefix;
  verify::TraceCertificate cert = verify::verify_trace(
      tf, *protocol, oracle::SearchBudget{budget_depth, budget_states},
      prefix);

  if (json_output) {
    json j;
    j["steps_checked"] = cert.steps_checked;
    j["bivalence_certified_prefix"] = cert.bivalence_certified_prefix;
    j["fairness_ok"] = cert.fairness_ok;
    j["indecision_ok"] = cert.indecision_ok;
    j["violations"] = json::array();
    for (const auto& v : cert.violations) {
      j["violations"].push_back({{"step", v.step}, {"what", v.what}});
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "verify: " << cert.steps_checked << "/" << tf.steps.size()
              << " steps checked, bivalent prefix "
              << cert.bivalence_certified_prefix << "/" << prefix
              << ", fairness " << (cert.fairness_ok ? "ok" : "BROKEN")
              << ", indecision " << (cert.indecision_ok ? "ok" : "BROKEN")
              << "\n";
    for (const auto& v : cert.violations) {
      std::cout << "  violation at step " << v.step << ": " << v.what << "\n";
    }
  }
  return cert.clean() ? kExitOk : kExitCertifiedNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"waffle: drives quorum consensus procedures forever without a "
               "decision, and certifies that it did"};
  app.require_subcommand(1);

  CommonOpts attack_opts;
  int steps = 1000;
  std::string variant = "program";
  int certify_prefix = 20;
  std::string out_path = "waffle-attack.trace";
  CLI::App* attack = app.add_subcommand(
      "attack", "construct an indecisive execution step by step");
  add_common(attack, attack_opts, false);
  attack->add_option("--steps", steps, "number of round-robin turns");
  attack->add_option("--variant", variant,
                     "one-step construction: program|fork");
  attack->add_option("--certify-prefix", certify_prefix,
                     "turn states to certify bivalent");
  attack->add_option("--out", out_path, "trace output path ('' to skip)");

  CommonOpts witness_opts;
  std::string init_text;
  int exclude = 1;
  CLI::App* witness = app.add_subcommand(
      "witness", "run the nonblocking witness from an initialization");
  add_common(witness, witness_opts, false);
  witness->add_option("--init", init_text, "input bitstring, length n")
      ->required();
  witness->add_option("--exclude", exclude, "process left out of the subset")
      ->required();

  CommonOpts blocking_opts;
  CLI::App* blocking = app.add_subcommand(
      "blocking", "search for a certified blocking scenario");
  add_common(blocking, blocking_opts);

  CommonOpts agreement_opts;
  CLI::App* agreement = app.add_subcommand(
      "agreement", "search reachable states for an agreement violation");
  add_common(agreement, agreement_opts);

  CommonOpts init_opts;
  CLI::App* init_search = app.add_subcommand(
      "init-search", "find the bivalent initial state on the ladder");
  add_common(init_search, init_opts);

  std::string trace_path;
  int v_budget_depth = 12;
  size_t v_budget_states = 2'000'000;
  int v_certify_prefix = -1;
  bool v_json = false;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "re-execute and certify a trace file");
  verify_cmd->add_option("--trace", trace_path, "trace file")->required();
  verify_cmd->add_option("--budget-depth", v_budget_depth, "search depth");
  verify_cmd->add_option("--budget-states", v_budget_states, "state budget");
  verify_cmd->add_option("--certify-prefix", v_certify_prefix,
                         "override the trace's certify prefix");
  verify_cmd->add_flag("--json", v_json, "machine output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (attack->parsed()) {
      return cmd_attack(attack_opts, steps, variant, certify_prefix, out_path);
    }
    if (witness->parsed()) {
      return cmd_witness(witness_opts, init_text, exclude);
    }
    if (blocking->parsed()) return cmd_blocking(blocking_opts);
    if (agreement->parsed()) return cmd_agreement(agreement_opts);
    if (init_search->parsed()) return cmd_init_search(init_opts);
    if (verify_cmd->parsed()) {
      return cmd_verify(trace_path, v_budget_depth, v_budget_states,
                        v_certify_prefix, v_json);
    }
  } catch (const AgreementGateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const NotResponsiveError& e) {
    std::cerr << "error: not responsive: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const OracleExhaustedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnknown;
  } catch (const MalformedTraceError& e) {
    std::cerr << "error: malformed trace: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnknown;
  }
  return kExitUsage;
}
