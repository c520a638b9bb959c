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

#include "doctest.h"
#include "waffle/trace.hpp"

using namespace waffle;

namespace {

trace::TraceFile sample() {
  trace::TraceFile tf;
  tf.header.digest_algo = "fnv1a64";
  tf.header.digest_version = 1;
  tf.header.protocol = "uniform-vote";
  tf.header.n = 3;
  tf.header.variant = "program";
  tf.header.budget_depth = 12;
  tf.header.budget_states = 2000000;
  tf.header.certify_prefix = 20;
  tf.header.init = {1, 1, 0};

  trace::TraceStep s0;
  s0.index = 0;
  s0.turn = 1;
  s0.extension = {Action::deliver(2, 1), Action::deliver(3, 2)};
  s0.applied = Action::null_step(1);
  s0.mode = "commute";
  s0.digest = 0x0123456789abcdefull;
  tf.steps.push_back(s0);

  trace::TraceStep s1;
  s1.index = 1;
  s1.turn = 2;
  s1.mode = "served";
  s1.extension = {Action::deliver(2, 3)};
  s1.digest = 0xfull;
  tf.steps.push_back(s1);

  tf.footer.rounds = 0;
  tf.footer.served = 1;
  tf.footer.commuted = 1;
  tf.footer.total_actions = 4;
  return tf;
}

}  // namespace

TEST_CASE("traces survive a text round trip") {
  trace::TraceFile tf = sample();
  std::string text = trace::to_text(tf);
  trace::TraceFile back = trace::from_text(text);

  CHECK(back.header.protocol == tf.header.protocol);
  CHECK(back.header.n == tf.header.n);
  CHECK(back.header.init == tf.header.init);
  CHECK(back.header.certify_prefix == tf.header.certify_prefix);
  REQUIRE(back.steps.size() == tf.steps.size());
  for (size_t k = 0; k < tf.steps.size(); ++k) {
    CHECK(back.steps[k].index == tf.steps[k].index);
    CHECK(back.steps[k].turn == tf.steps[k].turn);
    CHECK(back.steps[k].extension == tf.steps[k].extension);
    CHECK(back.steps[k].applied == tf.steps[k].applied);
    CHECK(back.steps[k].mode == tf.steps[k].mode);
    CHECK(back.steps[k].digest == tf.steps[k].digest);
  }
  CHECK(back.footer.served == tf.footer.served);
  CHECK(back.footer.total_actions == tf.footer.total_actions);

  // serialization is stable
  CHECK(trace::to_text(back) == text);
}

TEST_CASE("malformed traces are rejected") {
  std::string good = trace::to_text(sample());

  CHECK_THROWS_AS(trace::from_text("nonsense 1\n"), MalformedTraceError);
  CHECK_THROWS_AS(trace::from_text(""), MalformedTraceError);

  // truncate after the begin marker
  std::string truncated = good.substr(0, good.find("begin\n") + 6);
  CHECK_THROWS_AS(trace::from_text(truncated), MalformedTraceError);

  // corrupt a digest into the wrong width
  std::string bad_digest = good;
  auto at = bad_digest.find("0123456789abcdef");
  bad_digest.replace(at, 16, "0123");
  CHECK_THROWS_AS(trace::from_text(bad_digest), MalformedTraceError);

  // corrupt an action
  std::string bad_action = good;
  at = bad_action.find("d:2:1");
  bad_action.replace(at, 5, "d:2:2");
  CHECK_THROWS_AS(trace::from_text(bad_action), MalformedTraceError);
}

TEST_CASE("action text forms parse back") {
  CHECK(parse_action("d:2:1") == Action::deliver(2, 1));
  CHECK(parse_action("n:3") == Action::null_step(3));
  CHECK_FALSE(parse_action("d:2:2").has_value());
  CHECK_FALSE(parse_action("x:1").has_value());
  CHECK_FALSE(parse_action("d:2").has_value());
  CHECK(parse_schedule("-")->empty());
  CHECK(parse_schedule("d:1:2,n:1") ==
        Schedule{Action::deliver(1, 2), Action::null_step(1)});
  CHECK_FALSE(parse_schedule("d:1:2,,n:1").has_value());
}
