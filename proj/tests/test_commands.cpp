#include <doctest.h>

#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "wavecrest/commands.hpp"
#include "wavecrest/csv.hpp"

namespace fs = std::filesystem;
using namespace wavecrest;

namespace {

const std::string kFig1 = std::string(WAVECREST_SCENARIOS) + "/fig1.scn";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wavecrest_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(WAVECREST_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::size_t lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("check passes every row") {
  std::ostringstream out;
  CHECK(cmd_check(out) == kExitOk);
  CHECK(out.str().find("FAIL") == std::string::npos);
  CHECK(out.str().find("all checks passed") != std::string::npos);
}

TEST_CASE("simulate writes outputs and a manifest") {
  const fs::path dir = scratch("sim");
  const int rc = cli("simulate " + kFig1 + " --out " + dir.string(), dir / "log.txt");
  REQUIRE(rc == kExitOk);
  for (const char* f : {"events.csv", "worldlines.csv", "segments.csv", "trace.csv", "report.csv",
                        "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(dir / f), f);
  }
  const auto m = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(m["tool"] == "wavecrest");
  CHECK(m["version"] == std::string(kToolVersion));
  CHECK(m["scenario_digest"] == "sha256:" + sha256_hex(read_file(kFig1)));
  REQUIRE(m["outputs"].size() == 5);
  CHECK(m["outputs"][0]["file"] == "events.csv");
  CHECK(m["outputs"][0]["sha256"] == sha256_hex(read_file(dir / "events.csv")));
  const std::string events = read_file(dir / "events.csv");
  CHECK(events.rfind("id,", 0) == 0);
  CHECK(lines(events) > 100);
  CHECK(read_file(dir / "report.csv").find("stationary") != std::string::npos);
}

TEST_CASE("simulate is byte-for-byte repeatable") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  REQUIRE(cmd_simulate(kFig1, a, {}, std::cerr) == kExitOk);
  REQUIRE(cmd_simulate(kFig1, b, {}, std::cerr) == kExitOk);
  for (const char* f : {"events.csv", "worldlines.csv", "segments.csv", "trace.csv", "report.csv",
                        "manifest.json"}) {
    CHECK_MESSAGE(read_file(a / f) == read_file(b / f), f);
  }
}

TEST_CASE("superluminal splitter exits with a validation error naming the segment") {
  const fs::path dir = scratch("kg");
  std::string text = read_file(kFig1);
  text.replace(text.find("family = schrodinger"), 20, "family = klein_gordon");
  text.replace(text.find("c = 1\n"), 6, "c = 0.9\n");
  write_file_atomic(dir / "kg.scn", text);
  CHECK(cli("simulate " + (dir / "kg.scn").string() + " --out " + dir.string(), dir / "log.txt") ==
        kExitValidation);
  const std::string log = read_file(dir / "log.txt");
  CHECK_MESSAGE(log.find("segment 2") != std::string::npos, log);
  CHECK_FALSE(fs::exists(dir / "events.csv"));
}

TEST_CASE("malformed file exits 2 with the line number") {
  const fs::path dir = scratch("bad");
  std::string text = read_file(kFig1);
  text.replace(text.find("v_g = 0.2"), 9, "v_g = 0.2x");
  write_file_atomic(dir / "bad.scn", text);
  CHECK(cli("simulate " + (dir / "bad.scn").string() + " --out " + dir.string(), dir / "log.txt") ==
        kExitValidation);
  CHECK(read_file(dir / "log.txt").find("line 11") != std::string::npos);
}

TEST_CASE("unknown option is a usage error") {
  const fs::path dir = scratch("usage");
  CHECK(cli("simulate " + kFig1 + " --bogus", dir / "log.txt") == kExitValidation);
}

TEST_CASE("sweep writes one row per value") {
  const fs::path dir = scratch("sweep");
  const int rc = cli("sweep " + kFig1 + " --param detector.position --range 3:4:3 --out " + dir.string(),
                     dir / "log.txt");
  REQUIRE(rc == kExitOk);
  const std::string s = read_file(dir / "sweep.csv");
  CHECK(s.rfind("value,beat_frequency,visibility,stationary_phase_diff\n", 0) == 0);
  CHECK(lines(s) == 4);
  CHECK(fs::exists(dir / "run_0002" / "events.csv"));
  CHECK(cli("sweep " + kFig1 + " --param model.family --range 0:1:2 --out " + dir.string(),
            dir / "log.txt") == kExitValidation);
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
