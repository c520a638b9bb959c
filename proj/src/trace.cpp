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

#include "waffle/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "waffle/state.hpp"

namespace waffle::trace {

namespace {

uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16) throw MalformedTraceError("bad digest '" + s + "'");
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw MalformedTraceError("bad digest '" + s + "'");
  }
  return v;
}

long long parse_ll(const std::string& s, const char* what) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw MalformedTraceError(std::string("bad ") + what + " '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string to_text(const TraceFile& t) {
  std::ostringstream os;
  const TraceHeader& h = t.header;
  os << "waffle-trace " << kFormatVersion << "\n";
  os << "tool " << h.tool << " " << h.version << "\n";
  os << "digest " << h.digest_algo << " " << h.digest_version << "\n";
  os << "protocol " << h.protocol << "\n";
  os << "n " << h.n << "\n";
  os << "t " << h.t << "\n";
  os << "variant " << h.variant << "\n";
  os << "budget " << h.budget_depth << " " << h.budget_states << "\n";
  os << "certify-prefix " << h.certify_prefix << "\n";
  os << "init " << waffle::to_string(h.init) << "\n";
  os << "begin\n";
  for (const TraceStep& s : t.steps) {
    os << "step " << s.index << " turn " << s.turn << " ext "
       << waffle::to_string(s.extension) << " apply "
       << (s.applied ? waffle::to_string(*s.applied) : std::string("-"))
       << " mode " << s.mode << " digest " << digest_hex(s.digest) << "\n";
  }
  os << "end\n";
  os << "rounds " << t.footer.rounds << "\n";
  os << "modes served " << t.footer.served << " commute " << t.footer.commuted
     << " recert " << t.footer.recertified << "\n";
  os << "actions " << t.footer.total_actions << "\n";
  return os.str();
}

void write_trace(std::ostream& os, const TraceFile& t) { os << to_text(t); }

TraceFile from_text(const std::string& text) {
  std::istringstream is(text);
  return read_trace(is);
}

TraceFile read_trace(std::istream& is) {
  TraceFile t;
  std::string line;
  auto next_line = [&](const char* what) -> std::vector<std::string> {
    if (!std::getline(is, line)) {
      throw MalformedTraceError(std::string("missing ") + what);
    }
    return split(line);
  };
  auto expect = [&](const std::vector<std::string>& toks, size_t count,
                    const char* key) {
    if (toks.size() != count || toks[0] != key) {
      throw MalformedTraceError(std::string("expected '") + key + "' line");
    }
  };

  auto toks = next_line("magic");
  expect(toks, 2, "waffle-trace");
  if (parse_ll(toks[1], "format version") != kFormatVersion) {
    throw MalformedTraceError("unsupported trace format version");
  }

  toks = next_line("tool");
  expect(toks, 3, "tool");
  t.header.tool = toks[1];
  t.header.version = toks[2];

  toks = next_line("digest");
  expect(toks, 3, "digest");
  t.header.digest_algo = toks[1];
  t.header.digest_version = static_cast<int>(parse_ll(toks[2], "digest version"));

  toks = next_line("protocol");
  expect(toks, 2, "protocol");
  t.header.protocol = toks[1];

  toks = next_line("n");
  expect(toks, 2, "n");
  t.header.n = static_cast<int>(parse_ll(toks[1], "n"));

  toks = next_line("t");
  expect(toks, 2, "t");
  t.header.t = static_cast<int>(parse_ll(toks[1], "t"));

  toks = next_line("variant");
  expect(toks, 2, "variant");
  t.header.variant = toks[1];

  toks = next_line("budget");
  expect(toks, 3, "budget");
  t.header.budget_depth = static_cast<int>(parse_ll(toks[1], "budget depth"));
  t.header.budget_states =
      static_cast<size_t>(parse_ll(toks[2], "budget states"));

  toks = next_line("certify-prefix");
  expect(toks, 2, "certify-prefix");
  t.header.certify_prefix =
      static_cast<int>(parse_ll(toks[1], "certify prefix"));

  toks = next_line("init");
  expect(toks, 2, "init");
  auto iv = parse_init_vector(toks[1]);
  if (!iv || static_cast<int>(iv->size()) != t.header.n) {
    throw MalformedTraceError("bad init vector");
  }
  t.header.init = *iv;

  toks = next_line("begin");
  expect(toks, 1, "begin");

  for (;;) {
    toks = next_line("step or end");
    if (toks.size() == 1 && toks[0] == "end") break;
    if (toks.size() != 12 || toks[0] != "step" || toks[2] != "turn" ||
        toks[4] != "ext" || toks[6] != "apply" || toks[8] != "mode" ||
        toks[10] != "digest") {
      throw MalformedTraceError("bad step line: " + line);
    }
    TraceStep s;
    s.index = static_cast<size_t>(parse_ll(toks[1], "step index"));
    s.turn = static_cast<ProcessId>(parse_ll(toks[3], "turn process"));
    auto ext = parse_schedule(toks[5]);
    if (!ext) throw MalformedTraceError("bad extension: " + toks[5]);
    s.extension = *ext;
    if (toks[7] != "-") {
      auto a = parse_action(toks[7]);
      if (!a) throw MalformedTraceError("bad applied action: " + toks[7]);
      s.applied = *a;
    }
    s.mode = toks[9];
    if (s.mode != "served" && s.mode != "commute" && s.mode != "recert") {
      throw MalformedTraceError("bad mode: " + s.mode);
    }
    s.digest = parse_hex64(toks[11]);
    t.steps.push_back(std::move(s));
  }

  toks = next_line("rounds");
  expect(toks, 2, "rounds");
  t.footer.rounds = static_cast<size_t>(parse_ll(toks[1], "rounds"));

  toks = next_line("modes");
  if (toks.size() != 7 || toks[0] != "modes" || toks[1] != "served" ||
      toks[3] != "commute" || toks[5] != "recert") {
    throw MalformedTraceError("bad modes line");
  }
  t.footer.served = static_cast<size_t>(parse_ll(toks[2], "served"));
  t.footer.commuted = static_cast<size_t>(parse_ll(toks[4], "commute"));
  t.footer.recertified = static_cast<size_t>(parse_ll(toks[6], "recert"));

  toks = next_line("actions");
  expect(toks, 2, "actions");
  t.footer.total_actions =
      static_cast<size_t>(parse_ll(toks[1], "total actions"));

  return t;
}

TraceFile load_trace_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MalformedTraceError("cannot open trace file " + path);
  return read_trace(f);
}

void save_trace_file(const std::string& path, const TraceFile& t) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write trace file " + path);
  write_trace(f, t);
}

}  // namespace waffle::trace
