#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "maxstrat/cli.hpp"
#include "support/models.hpp"

using namespace maxstrat;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string thermostat() { return test_support::model_path("thermostat"); }

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, sep);) fields.push_back(f);
  return fields;
}

}  // namespace

TEST(Cli, AnalyzePrintsThermostatInvariant) {
  Outcome r = run({"analyze", thermostat(), "--template", "box"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out,
            "system thermostat\n"
            "row 1: t\n"
            "  (not e) -> 365/16\n"
            "  e -> -inf\n"
            "row 2: -t\n"
            "  (and (not e) h) -> -16\n"
            "  (and (not e) (not h)) -> -71/4\n"
            "  e -> -inf\n");
}

TEST(Cli, OracleAgreesOnThermostat) {
  Outcome r = run({"analyze", thermostat(), "--variant", "n", "--oracle"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("oracle: agree"), std::string::npos);
  EXPECT_EQ(r.err, "");
}

TEST(Cli, MissingFileExitsOne) {
  Outcome r = run({"analyze", "/nonexistent/model.ts"});
  EXPECT_EQ(r.code, cli::kError);
  EXPECT_NE(r.err.find("cannot read"), std::string::npos);
}

TEST(Cli, UnknownFlagExitsOne) {
  EXPECT_EQ(run({"analyze", thermostat(), "--bogus"}).code, cli::kError);
  EXPECT_EQ(run({"analyze", thermostat(), "--variant", "x"}).code, cli::kError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kError);
  EXPECT_EQ(run({}).code, cli::kError);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, cli::kOk); }

TEST(Cli, ParseErrorReportsPosition) {
  auto path = write_temp("maxstrat_cli_bad.ts", "system s\nbool a\ninit a'\ntransition a'\n");
  Outcome r = run({"analyze", path.string()});
  EXPECT_EQ(r.code, cli::kError);
  EXPECT_NE(r.err.find(path.string() + ":3:"), std::string::npos) << r.err;
}

TEST(Cli, MachineOutputIsDeterministic) {
  std::vector<std::string> args{"analyze", thermostat(), "--out", "machine", "--stats"};
  Outcome a = run(args);
  Outcome b = run(args);
  EXPECT_EQ(a.code, cli::kOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.find("wall_ms"), std::string::npos);
  EXPECT_EQ(a.out.rfind("system thermostat\nrow 0 t\ncell 365/16 ", 0), 0U) << a.out;
}

TEST(Cli, MachineOutputIsIdenticalAcrossVariants) {
  std::string first;
  for (std::string v : {"n", "t", "s", "g", "m"}) {
    Outcome r = run({"analyze", thermostat(), "--variant", v, "--out", "machine"});
    ASSERT_EQ(r.code, cli::kOk);
    if (first.empty()) first = r.out;
    EXPECT_EQ(r.out, first) << v;
  }
}

TEST(Cli, StatsBlockListsCounters) {
  Outcome r = run({"analyze", thermostat(), "--stats"});
  for (const char* key : {"iterations = 3", "smt_checks = ", "sat_enumerations = ", "lp_variables = ",
                          "lp_rows = ", "classes = ", "frozen_rows = 0", "wall_ms = "}) {
    EXPECT_NE(r.out.find(key), std::string::npos) << key;
  }
}

TEST(Cli, RowsTemplateFile) {
  auto rows = write_temp("maxstrat_cli_rows.tpl", "template rows ((1 t))\n");
  Outcome r = run({"analyze", thermostat(), "--template", "rows", rows.string(), "--oracle"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("row 1: t\n"), std::string::npos);
  EXPECT_EQ(r.out.find("row 2"), std::string::npos);
  EXPECT_EQ(run({"analyze", thermostat(), "--template", "rows"}).code, cli::kError);
  EXPECT_EQ(run({"analyze", thermostat(), "--template", "diamond"}).code, cli::kError);
}

TEST(Cli, FreezeFlagIsAccepted) {
  Outcome r = run({"analyze", thermostat(), "--freeze", "1", "--stats", "--oracle"});
  EXPECT_NE(r.code, cli::kError) << r.err;
  EXPECT_EQ(run({"analyze", thermostat(), "--freeze", "0"}).code, cli::kError);
}

TEST(Cli, BadExternalBackendIsAnError) {
  Outcome r = run({"analyze", thermostat(), "--smt-backend", "cvc9"});
  EXPECT_EQ(r.code, cli::kError);
}

TEST(Cli, BenchCsvShape) {
  Outcome r = run({"bench", "array1d", "--sizes", "1..4", "--variants", "n,g", "--jobs", "3"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  auto lines = split(r.out, '\n');
  ASSERT_EQ(lines.size(), 9U);
  EXPECT_EQ(lines[0], cli::kBenchHeader);
  std::size_t last_size = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    auto f = split(lines[k], ',');
    ASSERT_EQ(f.size(), 12U);
    EXPECT_EQ(f[0], "array1d");
    std::size_t size = std::stoul(f[1]);
    EXPECT_GE(size, last_size);
    last_size = size;
    EXPECT_EQ(f[2], k % 2 == 1 ? "n" : "g");
    EXPECT_EQ(std::stoul(f[3]), size);
    EXPECT_EQ(f[11].size(), 16U);
  }
}

TEST(Cli, BenchHashesAgreeAcrossVariants) {
  auto rows = cli::run_bench("array2d", 1, 3, "ntsgm", {}, 4);
  ASSERT_EQ(rows.size(), 15U);
  for (std::size_t s = 0; s < 3; ++s) {
    std::set<std::string> hashes;
    for (std::size_t v = 0; v < 5; ++v) hashes.insert(rows[s * 5 + v].invariant_hash);
    EXPECT_EQ(hashes.size(), 1U) << "size " << s + 1;
  }
}

TEST(Cli, BenchIsIndependentOfJobs) {
  auto serial = cli::run_bench("array1d", 2, 3, "gm", {}, 1);
  auto parallel = cli::run_bench("array1d", 2, 3, "gm", {}, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    EXPECT_EQ(serial[k].invariant_hash, parallel[k].invariant_hash);
    EXPECT_EQ(serial[k].stats.smt_checks, parallel[k].stats.smt_checks);
  }
}

TEST(Cli, BenchRejectsBadArguments) {
  EXPECT_EQ(run({"bench", "array4d"}).code, cli::kError);
  EXPECT_EQ(run({"bench", "array1d", "--sizes", "3..1"}).code, cli::kError);
  EXPECT_EQ(run({"bench", "array1d", "--sizes", "x"}).code, cli::kError);
  EXPECT_EQ(run({"bench", "array1d", "--variants", "nq"}).code, cli::kError);
}

TEST(Cli, Fnv1aKnownValues) {
  EXPECT_EQ(cli::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(cli::fnv1a_hex("a"), "af63dc4c8601ec8c");
}
