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

// Exit-code contract of the command-line driver: 0 definitive, 1 usage,
// 2 unknown/budget, 3 certified negative.

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace {

int cli(const std::string& args) {
  std::string cmd =
      std::string(WAFFLE_CLI_PATH) + " " + args + " > /dev/null 2> /dev/null";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("witness exit codes") {
  CHECK(cli("witness --protocol uniform-vote --n 3 --init 000 --exclude 1") ==
        0);
  // certified blocked: the excluded process never broadcast its input
  CHECK(cli("witness --protocol flood-all --n 3 --init 010 --exclude 2") == 3);
  // wrong bitstring length
  CHECK(cli("witness --protocol uniform-vote --n 3 --init 0101 --exclude 1") ==
        1);
  CHECK(cli("witness --protocol uniform-vote --n 3 --init 000 --exclude 9") ==
        1);
}

TEST_CASE("attack exit codes") {
  CHECK(cli("attack --protocol uniform-vote --n 1 --steps 5 --out ''") == 1);
  // inconsistent protocol: refused by the agreement gate
  CHECK(cli("attack --protocol constant --n 3 --steps 5 --out ''") == 2);
  // blocked protocol: fails the responsiveness precheck
  CHECK(cli("attack --protocol flood-all --n 3 --steps 5 --out ''") == 2);
}

TEST_CASE("search command exit codes") {
  CHECK(cli("blocking --protocol flood-all --n 3") == 0);
  CHECK(cli("blocking --protocol constant --n 3") == 0);
  CHECK(cli("agreement --protocol constant --n 2") == 0);
  CHECK(cli("init-search --protocol uniform-vote --n 3 --json") == 0);
  CHECK(cli("nonsense") == 1);
}

TEST_CASE("verify accepts a fresh trace and rejects a corrupted copy") {
  std::string path = "cli_test.trace";
  REQUIRE(cli("attack --protocol uniform-vote --n 3 --steps 30 "
              "--certify-prefix 3 --out " +
              path) == 0);
  CHECK(cli("verify --trace " + path) == 0);

  // corrupt one digest nibble
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  auto at = text.find("digest ", text.find("step 7 "));
  REQUIRE(at != std::string::npos);
  char& c = text[at + 7];
  c = c == 'f' ? '0' : 'f';
  std::ofstream out(path + ".bad");
  out << text;
  out.close();
  CHECK(cli("verify --trace " + path + ".bad") == 3);

  CHECK(cli("verify --trace does_not_exist.trace") == 1);
}
