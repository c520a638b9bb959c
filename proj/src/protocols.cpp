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

#include "waffle/protocols.hpp"

#include <algorithm>
#include <array>

namespace waffle {

namespace {

void check_pid(ProcessId i, int n) {
  if (i < 1 || i > n) {
    throw OutOfRangeError("process id " + std::to_string(i) +
                          " out of range 1.." + std::to_string(n));
  }
}

std::vector<Send> broadcast(int n, ProcessId self, const Payload& msg) {
  std::vector<Send> out;
  out.reserve(n - 1);
  for (ProcessId r = 1; r <= n; ++r) {
    if (r != self) out.push_back(Send{r, msg});
  }
  return out;
}

// --- UniformVote local state codec ----------------------------------------
//
// words layout:
//   [0] decided (-1 none, 0, 1)
//   [1] value
//   [2] round (>= 1)
//   [3] phase (0 votes, 1 proposals)
//   [4] own proposal (-2 unset, -1 none, 0, 1)
//   [5] pending entry count m
//   then m * 4 sorted entries (round, phase, sender, value)

constexpr int32_t kNoneBit = -1;
constexpr int32_t kNoProposal = -2;
constexpr int32_t kBottom = -1;  // "no value" proposal

struct UvEntry {
  int32_t round, phase, sender, value;
  auto operator<=>(const UvEntry&) const = default;
};

struct UvLocal {
  int32_t decided = kNoneBit;
  int32_t value = 0;
  int32_t round = 1;
  int32_t phase = 0;
  int32_t proposal = kNoProposal;
  std::vector<UvEntry> pending;
};

UvLocal uv_decode(const LocalState& l) {
  UvLocal u;
  u.decided = l.words[0];
  u.value = l.words[1];
  u.round = l.words[2];
  u.phase = l.words[3];
  u.proposal = l.words[4];
  int32_t m = l.words[5];
  u.pending.reserve(m);
  for (int32_t e = 0; e < m; ++e) {
    size_t at = 6 + 4 * static_cast<size_t>(e);
    u.pending.push_back(
        UvEntry{l.words[at], l.words[at + 1], l.words[at + 2], l.words[at + 3]});
  }
  return u;
}

LocalState uv_encode(const UvLocal& u) {
  LocalState l;
  l.words = {u.decided, u.value, u.round, u.phase, u.proposal,
             static_cast<int32_t>(u.pending.size())};
  for (const UvEntry& e : u.pending) {
    l.words.push_back(e.round);
    l.words.push_back(e.phase);
    l.words.push_back(e.sender);
    l.words.push_back(e.value);
  }
  return l;
}

LocalState uv_decided_local(Bit v) {
  UvLocal u;
  u.decided = v;
  u.value = v;
  u.round = 0;
  u.phase = 0;
  u.proposal = kNoProposal;
  return uv_encode(u);
}

// Runs phase completions until the quorum rule stalls or the process
// decides. A phase completes once own value plus collected entries reach
// n-1 values; completion consumes everything collected for that phase.
void uv_pump(UvLocal& u, int n, ProcessId self, std::vector<Send>& sends) {
  for (;;) {
    if (u.decided != kNoneBit) return;

    std::vector<int32_t> got;
    for (const UvEntry& e : u.pending) {
      if (e.round == u.round && e.phase == u.phase) got.push_back(e.value);
    }
    if (1 + static_cast<int>(got.size()) < n - 1) return;

    auto consumed = [&](const UvEntry& e) {
      return e.round == u.round && e.phase == u.phase;
    };
    u.pending.erase(std::remove_if(u.pending.begin(), u.pending.end(), consumed),
                    u.pending.end());

    if (u.phase == 0) {
      bool unanimous =
          std::all_of(got.begin(), got.end(),
                      [&](int32_t v) { return v == u.value; });
      u.proposal = unanimous ? u.value : kBottom;
      u.phase = 1;
      auto msg = Payload{UniformVote::kTagProposal, u.round, u.proposal};
      auto out = broadcast(n, self, msg);
      sends.insert(sends.end(), out.begin(), out.end());
      continue;
    }

    // Proposal phase complete: decide on unanimity of real values, else
    // adopt the round's real value (ties and all-none fall to 0).
    got.push_back(u.proposal);
    bool unanimous_real =
        got[0] != kBottom &&
        std::all_of(got.begin(), got.end(),
                    [&](int32_t v) { return v == got[0]; });
    if (unanimous_real) {
      Bit v = got[0];
      u = UvLocal{};
      u.decided = v;
      u.value = v;
      u.round = 0;
      auto out = broadcast(n, self, Payload{UniformVote::kTagDecided, 0, v});
      sends.insert(sends.end(), out.begin(), out.end());
      return;
    }
    int ones = 0, zeros = 0;
    for (int32_t v : got) {
      if (v == 1) ++ones;
      if (v == 0) ++zeros;
    }
    u.value = ones > zeros ? 1 : 0;
    u.round += 1;
    u.phase = 0;
    u.proposal = kNoProposal;

    // Entries from completed rounds can never be used again.
    auto stale = [&](const UvEntry& e) {
      return std::pair(e.round, e.phase) < std::pair(u.round, u.phase);
    };
    u.pending.erase(std::remove_if(u.pending.begin(), u.pending.end(), stale),
                    u.pending.end());

    auto out =
        broadcast(n, self, Payload{UniformVote::kTagVote, u.round, u.value});
    sends.insert(sends.end(), out.begin(), out.end());
  }
}

}  // namespace

UniformVote::UniformVote(int n) : n_(n) {
  if (n < 2) throw PreconditionError("uniform-vote needs n >= 2");
}

StepEffect UniformVote::init(ProcessId i, Bit input) const {
  check_pid(i, n_);
  UvLocal u;
  u.value = input;
  std::vector<Send> sends = broadcast(n_, i, Payload{kTagVote, 1, input});
  uv_pump(u, n_, i, sends);
  return StepEffect{uv_encode(u), std::move(sends)};
}

StepEffect UniformVote::on_deliver(ProcessId i, const LocalState& local,
                                   const Payload& payload,
                                   ProcessId sender) const {
  check_pid(i, n_);
  UvLocal u = uv_decode(local);
  if (u.decided != kNoneBit) {
    return StepEffect{local, {}};  // consume without effect
  }
  std::vector<Send> sends;
  if (payload.tag == kTagDecided) {
    auto out = broadcast(n_, i, Payload{kTagDecided, 0, payload.b});
    return StepEffect{uv_decided_local(payload.b), std::move(out)};
  }
  if (payload.tag == kTagVote || payload.tag == kTagProposal) {
    UvEntry e{payload.a, payload.tag == kTagVote ? 0 : 1, sender, payload.b};
    bool stale =
        std::pair(e.round, e.phase) < std::pair(u.round, u.phase);
    if (!stale) {
      auto at = std::lower_bound(u.pending.begin(), u.pending.end(), e);
      if (at == u.pending.end() || !(*at == e)) u.pending.insert(at, e);
      uv_pump(u, n_, i, sends);
    }
    return StepEffect{uv_encode(u), std::move(sends)};
  }
  throw Error("uniform-vote: unknown payload tag " +
              std::to_string(payload.tag));
}

StepEffect UniformVote::on_null(ProcessId i, const LocalState& local) const {
  check_pid(i, n_);
  return StepEffect{local, {}};
}

std::optional<Bit> UniformVote::decided(const LocalState& local) const {
  return local.words[0] == kNoneBit ? std::nullopt
                                    : std::make_optional<Bit>(local.words[0]);
}

UniformVote::View UniformVote::view(const LocalState& local) {
  View v;
  if (local.words[0] != kNoneBit) v.decided = local.words[0];
  v.value = local.words[1];
  v.round = local.words[2];
  v.phase = local.words[3];
  v.pending = local.words[5];
  return v;
}

// --- FloodAll ---------------------------------------------------------------
//
// words layout: [0] decided, [1] input, [2] broadcast flag, [3] count m,
// then m * 2 sorted entries (sender, value).

FloodAll::FloodAll(int n) : n_(n) {
  if (n < 2) throw PreconditionError("flood-all needs n >= 2");
}

StepEffect FloodAll::init(ProcessId i, Bit input) const {
  check_pid(i, n_);
  LocalState l;
  l.words = {kNoneBit, input, 0, 0};
  return StepEffect{std::move(l), {}};
}

StepEffect FloodAll::on_deliver(ProcessId i, const LocalState& local,
                                const Payload& payload,
                                ProcessId sender) const {
  check_pid(i, n_);
  if (local.words[0] != kNoneBit) return StepEffect{local, {}};
  if (payload.tag != kTagInput) {
    throw Error("flood-all: unknown payload tag " +
                std::to_string(payload.tag));
  }
  LocalState l = local;
  int32_t m = l.words[3];
  std::vector<std::array<int32_t, 2>> got;
  got.reserve(m + 1);
  for (int32_t e = 0; e < m; ++e) {
    got.push_back({l.words[4 + 2 * e], l.words[5 + 2 * e]});
  }
  std::array<int32_t, 2> entry{sender, payload.b};
  auto at = std::lower_bound(got.begin(), got.end(), entry);
  if (at == got.end() || !(*at == entry)) got.insert(at, entry);

  int32_t decided = kNoneBit;
  if (static_cast<int>(got.size()) == n_ - 1) {
    int32_t mn = l.words[1];
    for (const auto& g : got) mn = std::min(mn, g[1]);
    decided = mn;
  }
  l.words = {decided, l.words[1], l.words[2],
             static_cast<int32_t>(got.size())};
  for (const auto& g : got) {
    l.words.push_back(g[0]);
    l.words.push_back(g[1]);
  }
  return StepEffect{std::move(l), {}};
}

StepEffect FloodAll::on_null(ProcessId i, const LocalState& local) const {
  check_pid(i, n_);
  if (local.words[0] != kNoneBit || local.words[2] != 0) {
    return StepEffect{local, {}};
  }
  LocalState l = local;
  l.words[2] = 1;
  return StepEffect{std::move(l),
                    broadcast(n_, i, Payload{kTagInput, 0, local.words[1]})};
}

std::optional<Bit> FloodAll::decided(const LocalState& local) const {
  return local.words[0] == kNoneBit ? std::nullopt
                                    : std::make_optional<Bit>(local.words[0]);
}

// --- ConstantDecide ---------------------------------------------------------

ConstantDecide::ConstantDecide(int n) : n_(n) {
  if (n < 1) throw PreconditionError("constant needs n >= 1");
}

StepEffect ConstantDecide::init(ProcessId i, Bit input) const {
  check_pid(i, n_);
  LocalState l;
  l.words = {input};
  return StepEffect{std::move(l), {}};
}

StepEffect ConstantDecide::on_deliver(ProcessId i, const LocalState& local,
                                      const Payload&, ProcessId) const {
  check_pid(i, n_);
  return StepEffect{local, {}};
}

StepEffect ConstantDecide::on_null(ProcessId i,
                                   const LocalState& local) const {
  check_pid(i, n_);
  return StepEffect{local, {}};
}

std::optional<Bit> ConstantDecide::decided(const LocalState& local) const {
  return std::make_optional<Bit>(local.words[0]);
}

// --- factory ----------------------------------------------------------------

std::shared_ptr<const Protocol> make_protocol(const std::string& name, int n) {
  if (name == kUniformVote) return std::make_shared<UniformVote>(n);
  if (name == kFloodAll) return std::make_shared<FloodAll>(n);
  if (name == kConstantDecide) return std::make_shared<ConstantDecide>(n);
  throw Error("unknown protocol '" + name + "'");
}

std::vector<std::string> builtin_protocol_names() {
  return {kUniformVote, kFloodAll, kConstantDecide};
}

}  // namespace waffle
