#include "helpers.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Outcome {
  int code;
  std::string err;
};

Outcome cli(const std::string& args, const std::filesystem::path& dir) {
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + SSBOOST_CLI_PATH + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                          "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream in(err);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {status, ss.str()};
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("CLI end to end on a small session") {
  testing::TempDir dir("cli_flow");
  std::ofstream(dir / "spec.json") << R"({"planted_channels": "100000001000", "planted_band": [25, 35], "snr": 8,
                                          "n_trials": 40, "n_samples": 256, "seed": 5})";
  std::ofstream(dir / "cfg.json") << R"({"boost": {"k_max": 3}, "universe": {"sfb_pairs": 30}})";

  REQUIRE(cli("generate --spec " + q(dir / "spec.json") + " --out " + q(dir / "s.eegb"), dir.path()).code == 0);
  REQUIRE(std::filesystem::exists(dir / "s.eegb"));

  REQUIRE(cli("inspect --input " + q(dir / "s.eegb"), dir.path()).code == 0);
  const auto info = nlohmann::json::parse(read_text(dir / "stdout.txt"));
  CHECK(info.at("n_trials") == 40);
  CHECK(info.at("n_positive") == 20);
  CHECK(info.at("problems").empty());

  REQUIRE(cli("bands --out " + q(dir / "bands.json"), dir.path()).code == 0);
  CHECK(nlohmann::json::parse(read_text(dir / "bands.json")).at("count") == 42);

  for (const std::string run : {"a", "b"}) {
    const auto train = cli("--threads 2 train --input " + q(dir / "s.eegb") + " --mode sfb --config " +
                               q(dir / "cfg.json") + " --model-out " + q(dir / ("m_" + run + ".json")) +
                               " --trace-out " + q(dir / ("t_" + run + ".json")),
                           dir.path());
    REQUIRE_MESSAGE(train.code == 0, train.err);
  }
  CHECK(read_text(dir / "m_a.json") == read_text(dir / "m_b.json"));
  CHECK(read_text(dir / "t_a.json") == read_text(dir / "t_b.json"));

  REQUIRE(cli("inspect --model " + q(dir / "m_a.json"), dir.path()).code == 0);
  CHECK(nlohmann::json::parse(read_text(dir / "stdout.txt")).at("mode") == "sfb");

  REQUIRE(cli("evaluate --model " + q(dir / "m_a.json") + " --input " + q(dir / "s.eegb") + " --out " +
                  q(dir / "eval.json"),
              dir.path())
              .code == 0);
  CHECK(nlohmann::json::parse(read_text(dir / "eval.json")).at("n") == 40);

  REQUIRE(cli("predict --model " + q(dir / "m_a.json") + " --input " + q(dir / "s.eegb") + " --out " +
                  q(dir / "pred.csv"),
              dir.path())
              .code == 0);
  const auto csv = read_text(dir / "pred.csv");
  CHECK(csv.rfind("trial,label,score,predicted\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);

  REQUIRE(cli("importance --models " + q(dir / "m_a.json") + " " + q(dir / "m_b.json") + " --csv-out " +
                  q(dir / "imp.csv") + " --drift-out " + q(dir / "drift.json"),
              dir.path())
              .code == 0);
  const auto imp = read_text(dir / "imp.csv");
  CHECK(std::count(imp.begin(), imp.end(), '\n') == 3);
  CHECK(nlohmann::json::parse(read_text(dir / "drift.json")).contains("sessions"));
}

TEST_CASE("CLI failures exit nonzero and name the offending path") {
  testing::TempDir dir("cli_errors");
  const auto missing = dir / "absent.eegb";
  auto r = cli("inspect --input " + q(missing), dir.path());
  CHECK(r.code != 0);
  CHECK(r.err.find(missing.string()) != std::string::npos);

  r = cli("generate --spec " + q(dir / "nope.json") + " --out " + q(dir / "x.eegb"), dir.path());
  CHECK(r.code != 0);
  CHECK(r.err.find("nope.json") != std::string::npos);

  r = cli("train --input " + q(missing) + " --mode bogus --model-out " + q(dir / "m.json"), dir.path());
  CHECK(r.code != 0);

  CHECK(cli("", dir.path()).code != 0);
}
