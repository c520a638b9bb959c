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

#include "waffle/state.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace waffle {

namespace {

constexpr uint64_t kFnvOffset = 1469598103934665603ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

struct Fnv1a {
  uint64_t h = kFnvOffset;

  void byte(uint8_t b) {
    h ^= b;
    h *= kFnvPrime;
  }
  void u32(uint32_t v) {
    byte(v & 0xff);
    byte((v >> 8) & 0xff);
    byte((v >> 16) & 0xff);
    byte((v >> 24) & 0xff);
  }
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    for (char c : s) byte(static_cast<uint8_t>(c));
  }
};

}  // namespace

size_t GlobalState::messages_in_flight() const {
  size_t total = 0;
  for (const auto& q : channels) total += q.size();
  return total;
}

uint64_t state_digest(const GlobalState& s) {
  Fnv1a f;
  f.byte('W');
  f.byte(static_cast<uint8_t>(kDigestVersion));
  f.i32(s.config.n);
  f.i32(s.config.t);
  f.str(s.config.protocol);
  for (const auto& local : s.locals) {
    f.u32(static_cast<uint32_t>(local.words.size()));
    for (int32_t w : local.words) f.i32(w);
  }
  for (const auto& q : s.channels) {
    f.u32(static_cast<uint32_t>(q.size()));
    for (const Payload& m : q) {
      f.i32(m.tag);
      f.i32(m.a);
      f.i32(m.b);
    }
  }
  return f.h;
}

std::string digest_hex(uint64_t d) {
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[d & 0xf];
    d >>= 4;
  }
  return out;
}

// --- textual forms for actions, schedules, init vectors ---------------------

std::string to_string(const Action& a) {
  if (a.kind == ActionKind::Deliver) {
    return "d:" + std::to_string(a.process) + ":" + std::to_string(a.sender);
  }
  return "n:" + std::to_string(a.process);
}

std::optional<Action> parse_action(const std::string& text) {
  auto parse_int = [](const std::string& s, int& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size() && !s.empty();
  };
  if (text.size() < 3 || text[1] != ':') return std::nullopt;
  if (text[0] == 'n') {
    int p = 0;
    if (!parse_int(text.substr(2), p) || p < 1) return std::nullopt;
    return Action::null_step(p);
  }
  if (text[0] == 'd') {
    auto sep = text.find(':', 2);
    if (sep == std::string::npos) return std::nullopt;
    int r = 0, s = 0;
    if (!parse_int(text.substr(2, sep - 2), r) ||
        !parse_int(text.substr(sep + 1), s) || r < 1 || s < 1 || r == s) {
      return std::nullopt;
    }
    return Action::deliver(r, s);
  }
  return std::nullopt;
}

std::string to_string(const Schedule& sched) {
  if (sched.empty()) return "-";
  std::string out;
  for (size_t i = 0; i < sched.size(); ++i) {
    if (i) out += ',';
    out += to_string(sched[i]);
  }
  return out;
}

std::optional<Schedule> parse_schedule(const std::string& text) {
  Schedule out;
  if (text == "-") return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto a = parse_action(item);
    if (!a) return std::nullopt;
    out.push_back(*a);
  }
  return out;
}

ProcessSet ProcessSet::all(int n) {
  ProcessSet q;
  q.n = n;
  q.bits = n >= 32 ? ~0u : ((1u << n) - 1u);
  return q;
}

ProcessSet ProcessSet::without(int n, ProcessId i) {
  ProcessSet q = all(n);
  if (i >= 1 && i <= n) q.bits &= ~(1u << (i - 1));
  return q;
}

void ProcessSet::insert(ProcessId p) {
  if (p >= 1 && p <= n) bits |= 1u << (p - 1);
}

int ProcessSet::size() const { return __builtin_popcount(bits); }

bool ProcessSet::subset_of(const ProcessSet& other) const {
  return (bits & ~other.bits) == 0;
}

std::vector<ProcessId> ProcessSet::ids() const {
  std::vector<ProcessId> out;
  for (ProcessId p = 1; p <= n; ++p) {
    if (contains(p)) out.push_back(p);
  }
  return out;
}

ProcessSet participants(const Schedule& sched, int n) {
  ProcessSet q;
  q.n = n;
  for (const Action& a : sched) q.insert(a.process);
  return q;
}

InitVector ladder_vector(int n, int j) {
  InitVector iv(n, 0);
  for (int i = 1; i <= j && i <= n; ++i) iv[i - 1] = 1;
  return iv;
}

std::string to_string(const InitVector& iv) {
  std::string out;
  for (Bit b : iv) out += b ? '1' : '0';
  return out;
}

std::optional<InitVector> parse_init_vector(const std::string& text) {
  InitVector iv;
  for (char c : text) {
    if (c == '0') {
      iv.push_back(0);
    } else if (c == '1') {
      iv.push_back(1);
    } else {
      return std::nullopt;
    }
  }
  if (iv.empty()) return std::nullopt;
  return iv;
}

DisabledActionError::DisabledActionError(const Action& a, size_t idx)
    : Error("disabled action " + waffle::to_string(a) + " at schedule index " +
            std::to_string(idx)),
      action(a),
      index(idx) {}

ReplayError::ReplayError(size_t idx)
    : Error("replay inapplicable at schedule index " + std::to_string(idx)),
      index(idx) {}

OracleExhaustedError::OracleExhaustedError(const std::string& what, size_t r)
    : Error(what), round(r) {}

}  // namespace waffle
