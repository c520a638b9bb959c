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

#ifndef WAFFLE_TRACE_HPP_
#define WAFFLE_TRACE_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "waffle/types.hpp"

namespace waffle::trace {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

/// Canonical line-delimited trace of an attack run. Field order is fixed so
/// byte-identical flags give byte-identical files; digests are recomputable
/// from the header and actions alone.
struct TraceHeader {
  std::string tool = "waffle";
  std::string version = kToolVersion;
  std::string digest_algo;
  int digest_version = 0;
  std::string protocol;
  int n = 0;
  int t = 1;
  std::string variant;
  int budget_depth = 0;
  size_t budget_states = 0;
  int certify_prefix = 0;
  InitVector init;
};

struct TraceStep {
  size_t index = 0;
  ProcessId turn = 0;
  Schedule extension;
  std::optional<Action> applied;  // absent when the extension served the turn
  std::string mode;               // served | commute | wt
  uint64_t digest = 0;            // state digest after the turn
};

struct TraceFooter {
  size_t rounds = 0;
  size_t served = 0;
  size_t commuted = 0;
  size_t recertified = 0;
  size_t total_actions = 0;
};

struct TraceFile {
  TraceHeader header;
  std::vector<TraceStep> steps;
  TraceFooter footer;
};

std::string to_text(const TraceFile& t);
void write_trace(std::ostream& os, const TraceFile& t);

/// Throws MalformedTraceError on any structural deviation.
TraceFile from_text(const std::string& text);
TraceFile read_trace(std::istream& is);

TraceFile load_trace_file(const std::string& path);
void save_trace_file(const std::string& path, const TraceFile& t);

}  // namespace waffle::trace

#endif  // WAFFLE_TRACE_HPP_
