#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qmldesk/report.hpp"

using nlohmann::json;

namespace {

struct CliRun {
  int exit_code = 0;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  const std::string capture = "qmldesk_cli_capture.txt";
  const std::string command =
      std::string(QMLDESK_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(command.c_str());
  std::ifstream in(capture);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::remove(capture.c_str());
#ifdef _WIN32
  const int code = status;
#else
  const int code = WEXITSTATUS(status);
#endif
  return {code, buffer.str()};
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path);
  out << contents;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Fixtures {
  Fixtures() {
    write_file("qmldesk_cli_train.csv",
               "label,f1,f2\nA,1,0\nA,0.9,0.1\nB,0,1\nB,0.1,0.9\n");
    write_file("qmldesk_cli_query.csv", "f1,f2\n0.1,0.8\n");
  }
  ~Fixtures() {
    std::remove("qmldesk_cli_train.csv");
    std::remove("qmldesk_cli_query.csv");
  }
};

}  // namespace

TEST_CASE("classification emits a schema-valid report with the right label") {
  Fixtures fixtures;
  const CliRun run = run_cli(
      "classify --data qmldesk_cli_train.csv --query qmldesk_cli_query.csv --seed 3");
  REQUIRE(run.exit_code == 0);
  const json report = json::parse(run.output);

  std::string error;
  CHECK(qmldesk::validate_report(report, &error));
  CHECK(error.empty());
  CHECK(report["results"]["predictions"][0]["label"] == "B");
  CHECK(report["config"]["algorithm"] == "classify");
  CHECK(report["config"]["seed"] == 3);
}

TEST_CASE("identical configurations reproduce byte-identical reports minus wall time") {
  Fixtures fixtures;
  const std::string out_path = "qmldesk_cli_report.json";
  const std::string args = "classify --data qmldesk_cli_train.csv --query "
                           "qmldesk_cli_query.csv --seed 11 --shots 400 --out " +
                           out_path;

  REQUIRE(run_cli(args).exit_code == 0);
  const json first = json::parse(read_file(out_path));
  REQUIRE(run_cli(args).exit_code == 0);
  const json second = json::parse(read_file(out_path));
  std::remove(out_path.c_str());

  CHECK(qmldesk::determinism_view(first) == qmldesk::determinism_view(second));
  // Different seeds genuinely change the sampled content.
  const CliRun other = run_cli(
      "classify --data qmldesk_cli_train.csv --query qmldesk_cli_query.csv --seed 12 "
      "--shots 400");
  REQUIRE(other.exit_code == 0);
  CHECK(qmldesk::determinism_view(json::parse(other.output)) !=
        qmldesk::determinism_view(first));
}

TEST_CASE("unknown algorithms and bad inputs produce typed json errors") {
  const CliRun unknown = run_cli("frobnicate");
  CHECK(unknown.exit_code != 0);
  CHECK(json::parse(unknown.output)["error"]["type"] == "UnknownAlgorithm");

  const CliRun missing = run_cli("classify --data nope.csv --query nope.csv");
  CHECK(missing.exit_code != 0);
  const json error = json::parse(missing.output);
  CHECK(error["error"]["type"] == "ParseError");
  CHECK(error["error"]["message"].get<std::string>().find("cannot open") !=
        std::string::npos);
}

TEST_CASE("the shot-scaling bench emits a tsv sweep") {
  const CliRun run = run_cli("bench --suite shots --repeats 10 --seed 5 --format tsv");
  REQUIRE(run.exit_code == 0);
  REQUIRE(run.output.rfind("#", 0) == 0);

  std::istringstream lines(run.output);
  std::string header;
  std::getline(lines, header);
  CHECK(header.find("shots") != std::string::npos);

  double previous = 0.0;
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    double shots = 0.0;
    fields >> shots;
    CHECK(shots > previous);
    previous = shots;
    ++rows;
  }
  CHECK(rows >= 4);
}

TEST_CASE("training subcommands round-trip through csv fixtures") {
  write_file("qmldesk_cli_patterns.csv", "f1,f2,f3\n1,0,1\n1,0,1\n0,1,0\n");
  const CliRun run = run_cli(
      "train-bm --data qmldesk_cli_patterns.csv --hidden 2 --steps 40 --lr 0.2 --seed 9");
  std::remove("qmldesk_cli_patterns.csv");
  REQUIRE(run.exit_code == 0);
  const json report = json::parse(run.output);
  const auto& trace = report["results"]["log_likelihood_trace"];
  REQUIRE(trace.size() == 41);
  CHECK(trace.back().get<double>() > trace.front().get<double>());
}
