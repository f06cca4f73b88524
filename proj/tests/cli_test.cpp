// tests/cli_test.cpp

// Copyright 2026 The Intonate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Black-box tests of the command line tool. The binary location comes from
// the INTONATE_CLI environment variable (set by ctest).

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

namespace {

std::filesystem::path CliPath() {
  if (const char* env = std::getenv("INTONATE_CLI")) return env;
  return "tools/intonate";  // build-tree layout fallback
}

// Runs the tool, captures stdout to a file, returns the exit code.
int RunCli(const std::string& args, const std::filesystem::path& stdout_file = {}) {
  std::string command = "\"" + CliPath().string() + "\" " + args;
  command += stdout_file.empty() ? " > /dev/null 2>&1"
                                 : " > \"" + stdout_file.string() + "\" 2>/dev/null";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const std::string kTinyManifest =
    "s1\t他去学校。\tsta\n"
    "s2\t她看电影。\tsta\n"
    "q1\t他去不去学校？\tque\n"
    "q2\t她看不看电影？\tque\n"
    "d1\t他去学校？\tdecq\n"
    "d2\t她看电影？\tdecq\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("the binary under test exists") {
  REQUIRE_MESSAGE(std::filesystem::exists(CliPath()),
                  "set INTONATE_CLI to the intonate binary");
}

TEST_CASE("usage errors exit 1") {
  CHECK(RunCli("no-such-command") == 1);
  CHECK(RunCli("eval") == 1);  // missing required flags
  CHECK(RunCli("train --manifest") == 1);
  CHECK(RunCli("classify --checkpoint x.json") == 1);  // neither --manifest nor --text
}

TEST_CASE("help exits 0") {
  CHECK(RunCli("--help") == 0);
  CHECK(RunCli("train --help") == 0);
}

TEST_CASE("stats reports counts and echoes its config") {
  testutil::TempDir tmp;
  const auto manifest = tmp.file("m.tsv");
  testutil::WriteFile(manifest, kTinyManifest);
  const auto out = tmp.file("stats.json");
  CHECK(RunCli("stats --manifest \"" + manifest.string() + "\"", out) == 0);
  const nlohmann::json j = nlohmann::json::parse(testutil::ReadFile(out));
  CHECK(j.at("counts").at("sta") == 2);
  CHECK(j.at("counts").at("que") == 2);
  CHECK(j.at("counts").at("decq") == 2);
  CHECK(j.contains("config"));
}

TEST_CASE("data errors exit 2") {
  testutil::TempDir tmp;
  SUBCASE("missing manifest") {
    CHECK(RunCli("stats --manifest \"" + tmp.file("absent.tsv").string() + "\"") == 2);
  }
  SUBCASE("malformed manifest names the line") {
    const auto manifest = tmp.file("bad.tsv");
    testutil::WriteFile(manifest, "s1\t文本\tsta\ns2\t文本\tbogus\n");
    CHECK(RunCli("train --manifest \"" + manifest.string() + "\" --epochs 1") == 2);
  }
  SUBCASE("unloadable checkpoint") {
    const auto ckpt = tmp.file("ckpt.json");
    testutil::WriteFile(ckpt, "{}");
    CHECK(RunCli("say --checkpoint \"" + ckpt.string() + "\" --text 你好") == 2);
  }
}

TEST_CASE("the train - classify - say pipeline works end to end") {
  testutil::TempDir tmp;
  const auto manifest = tmp.file("m.tsv");
  testutil::WriteFile(manifest, kTinyManifest);
  const auto ckpt = tmp.file("ckpt.json");
  const auto history = tmp.file("hist.csv");

  REQUIRE(RunCli("train --manifest \"" + manifest.string() + "\" --out \"" +
                 ckpt.string() + "\" --history \"" + history.string() +
                 "\" --epochs 150 --lr 0.3 --embed-dim 16 --attn-dim 8 --table-dim 32 "
                 "--augment-strip-punct --seed 1") == 0);
  CHECK(std::filesystem::exists(ckpt));
  const std::string hist = testutil::ReadFile(history);
  CHECK(hist.rfind("epoch,mean_loss,accuracy\n", 0) == 0);

  SUBCASE("classify a manifest") {
    const auto preds = tmp.file("preds.json");
    REQUIRE(RunCli("classify --checkpoint \"" + ckpt.string() + "\" --manifest \"" +
                   manifest.string() + "\" --out \"" + preds.string() + "\"") == 0);
    const nlohmann::json j = nlohmann::json::parse(testutil::ReadFile(preds));
    CHECK(j.at("predictions").size() == 6);
    CHECK(j.at("accuracy").get<double>() == doctest::Approx(1.0));
    const auto& first = j.at("predictions").at(0);
    CHECK(first.contains("id"));
    CHECK(first.contains("predicted"));
    CHECK(first.contains("probs"));
    CHECK(first.contains("alpha"));
  }

  SUBCASE("classify a single text") {
    const auto out = tmp.file("one.json");
    REQUIRE(RunCli("classify --checkpoint \"" + ckpt.string() + "\" --text 她看电影？",
                   out) == 0);
    const nlohmann::json j = nlohmann::json::parse(testutil::ReadFile(out));
    CHECK(j.at("predictions").at(0).at("predicted") == "decq");
  }

  SUBCASE("say with a forced declarative label renders a rise") {
    const auto wav = tmp.file("say.wav");
    const auto json = tmp.file("say.json");
    REQUIRE(RunCli("say --checkpoint \"" + ckpt.string() +
                   "\" --text 他去学校 --label decq --out-wav \"" + wav.string() +
                   "\" --out-json \"" + json.string() + "\"") == 0);
    const nlohmann::json j = nlohmann::json::parse(testutil::ReadFile(json));
    CHECK(j.at("label") == "decq");
    CHECK(j.at("label_source") == "given");
    CHECK(j.at("rise_detected") == true);
    CHECK(std::filesystem::exists(wav));
  }

  SUBCASE("say with a forced statement label stays flat") {
    const auto json = tmp.file("sta.json");
    REQUIRE(RunCli("say --checkpoint \"" + ckpt.string() +
                   "\" --text 他去学校 --label sta --out-wav \"" +
                   tmp.file("sta.wav").string() + "\" --out-json \"" + json.string() +
                   "\"") == 0);
    const nlohmann::json j = nlohmann::json::parse(testutil::ReadFile(json));
    CHECK(j.at("rise_detected") == false);
  }

  SUBCASE("say driven by the classifier picks the label itself") {
    const auto json = tmp.file("auto.json");
    REQUIRE(RunCli("say --checkpoint \"" + ckpt.string() +
                   "\" --text 她看电影？ --out-wav \"" + tmp.file("auto.wav").string() +
                   "\" --out-json \"" + json.string() + "\"") == 0);
    const nlohmann::json j = nlohmann::json::parse(testutil::ReadFile(json));
    CHECK(j.at("label_source") == "predicted");
    CHECK(j.at("label") == "decq");
    CHECK(j.at("rise_detected") == true);
  }

  SUBCASE("an unknown label is a data error") {
    CHECK(RunCli("say --checkpoint \"" + ckpt.string() +
                 "\" --text 他去学校 --label xyz") == 2);
  }
}

TEST_CASE("synth-corpus, f0 and eval work together") {
  testutil::TempDir tmp;
  const auto corpus = tmp.file("corpus");
  REQUIRE(RunCli("synth-corpus --out-dir \"" + corpus.string() +
                 "\" --n-per-class 2 --seed 11") == 0);
  const auto manifest = corpus / "manifest.tsv";
  REQUIRE(std::filesystem::exists(manifest));

  SUBCASE("f0 extracts a track") {
    const auto csv = tmp.file("track.csv");
    REQUIRE(RunCli("f0 --in \"" + (corpus / "wav" / "sta-0000.wav").string() +
                   "\" --out \"" + csv.string() + "\"") == 0);
    const std::string track = testutil::ReadFile(csv);
    CHECK(track.rfind("frame,time_s,f0_hz,voiced\n", 0) == 0);
  }

  SUBCASE("self-eval scores zero and exposes the per-class table") {
    const auto csv = tmp.file("batch.csv");
    const auto json = tmp.file("summary.json");
    REQUIRE(RunCli("eval --manifest \"" + manifest.string() + "\" --ref-dir \"" +
                   (corpus / "wav").string() + "\" --hyp-dir \"" +
                   (corpus / "wav").string() + "\" --out-csv \"" + csv.string() +
                   "\" --out-json \"" + json.string() + "\"") == 0);
    const std::string batch = testutil::ReadFile(csv);
    CHECK(batch.rfind("id,class,ffe,gpe,vde,mean_mcd,rising_ref,rising_hyp\n", 0) == 0);

    const nlohmann::json j = nlohmann::json::parse(testutil::ReadFile(json));
    for (const char* key : {"sta", "que", "decq", "all"}) {
      CHECK(j.at("per_class").contains(key));
    }
    CHECK(j.at("per_class").at("all").at("ffe").get<double>() == doctest::Approx(0.0));
    CHECK(j.at("pairs").size() == 6);
    CHECK(j.contains("config"));
  }

  SUBCASE("a missing hypothesis file aborts with exit 2 and no outputs") {
    std::filesystem::remove(corpus / "wav" / "decq-0001.wav");
    const auto csv = tmp.file("partial.csv");
    const auto json = tmp.file("partial.json");
    CHECK(RunCli("eval --manifest \"" + manifest.string() + "\" --ref-dir \"" +
                 (corpus / "wav").string() + "\" --hyp-dir \"" +
                 (corpus / "wav").string() + "\" --out-csv \"" + csv.string() +
                 "\" --out-json \"" + json.string() + "\"") == 2);
    CHECK_FALSE(std::filesystem::exists(csv));
    CHECK_FALSE(std::filesystem::exists(json));
  }
}

TEST_CASE("check-grad passes its own verification") {
  CHECK(RunCli("check-grad --trials 10 --seed 4") == 0);
}

}  // TEST_SUITE("cli")
