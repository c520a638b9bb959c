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

#ifndef WAFFLE_VERIFY_HPP_
#define WAFFLE_VERIFY_HPP_

#include <string>
#include <vector>

#include "waffle/adversary.hpp"
#include "waffle/oracle.hpp"
#include "waffle/trace.hpp"

namespace waffle::verify {

struct Violation {
  size_t step = 0;
  std::string what;
};

struct TraceCertificate {
  size_t steps_checked = 0;
  size_t bivalence_certified_prefix = 0;
  bool fairness_ok = false;
  bool indecision_ok = false;
  std::vector<Violation> violations;

  bool clean() const { return violations.empty(); }
};

/**
 * Independent certification of a trace: re-executes every recorded action
 * from the recorded initialization, checking digest agreement at every step,
 * indecision at every intermediate state, round-robin fairness of the turn
 * sequence, and bivalence of the first certify_prefix turn states. Replay
 * stops at the first divergence so a single corrupted field yields a single
 * localized violation. Pure: two invocations agree.
 */
TraceCertificate verify_trace(const trace::TraceFile& t, const Protocol& p,
                              const oracle::SearchBudget& budget,
                              int certify_prefix);

struct InvariantVerdict {
  std::vector<std::string> failed;
  bool ok() const { return failed.empty(); }
};

/// Audits a logged backward walk against its four invariants: the walk's
/// position bookkeeping (I0), the maintained path being an i-free path to the
/// walk value (I1), no earlier flip of the witness at advanced positions
/// (re-run, not trusted; I2), and the walk starting beside the deciding end
/// (I3).
InvariantVerdict check_program_invariants(const adversary::ProgramLog& log,
                                          const Protocol& p,
                                          const oracle::SearchBudget& budget);

struct CommutativityReport {
  size_t trials = 0;
  size_t pairs_checked = 0;
  std::vector<std::string> counterexamples;

  bool ok() const { return counterexamples.empty(); }
};

/// Seeded randomized commutation trials: random reachable states, random
/// participant-disjoint schedule pairs, both interleavings must join.
CommutativityReport commutativity_suite(const Protocol& p, size_t trials,
                                        uint64_t seed, int depth);

/// Exhaustive sweep for n = 2: every pair of single-process schedules up to
/// the given length, from every state reachable within two steps of every
/// initialization.
CommutativityReport commutativity_exhaustive_n2(const Protocol& p, int depth);

}  // namespace waffle::verify

#endif  // WAFFLE_VERIFY_HPP_
