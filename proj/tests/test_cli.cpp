// Spawns the built CLI binary (argv[1]) and checks its surfaces.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

std::string g_binary;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = g_binary + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) {
    result.output += buf.data();
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

}  // namespace

TEST_CASE("encode prints the worked residues") {
  const RunResult r = run("encode --value 29 --moduli 17,19 --no-shift");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "12,10\n");
}

TEST_CASE("encode and decode round-trip with shifting") {
  const RunResult enc =
      run("--seed 5 encode --value 200 --moduli 17,19 --json");
  CHECK(enc.exit_code == 0);
  const auto j = nlohmann::json::parse(enc.output);
  std::string comps;
  for (const auto& c : j["components"]) {
    if (!comps.empty()) comps += ',';
    comps += std::to_string(c.get<std::uint64_t>());
  }
  const RunResult dec =
      run("decode --components " + comps + " --moduli 17,19");
  CHECK(dec.exit_code == 0);
  CHECK(dec.output == "200\n");
}

TEST_CASE("signed values pass through the offset range") {
  const RunResult enc =
      run("encode --signed-value -1 --moduli 17,19 --no-shift");
  CHECK(enc.exit_code == 0);
  CHECK(enc.output == "16,18\n");  // 322 mod 17, 322 mod 19
  const RunResult dec = run("decode --components 16,18 --moduli 17,19 --signed");
  CHECK(dec.output == "-1\n");
}

TEST_CASE("ops-demo reports the catalog") {
  const RunResult r = run("--json ops-demo --a 29 --b 27 --moduli 17,19");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["add"] == 56);
  CHECK(j["sub"] == 2);
  CHECK(j["mul"] == 137);  // 783 mod 323
  CHECK(j["less_than"] == false);
  CHECK(j["eq"] == false);
  CHECK(j["div"] == 1);
  CHECK(j["mod"] == 2);
}

TEST_CASE("aes subcommand matches the published vector in all modes") {
  const std::string key = "2b7e151628aed2a6abf7158809cf4f3c";
  const std::string block = "3243f6a8885a308d313198a2e0370734";
  for (const std::string mode :
       {"baseline", "protected-tree", "protected-grid"}) {
    const RunResult r = run("aes --key " + key + " --block " + block +
                            " --mode " + mode);
    CHECK(r.exit_code == 0);
    CHECK(r.output == "3925841d02dc09fbdc118597196a0b32\n");
  }
}

TEST_CASE("aes audit writes trace and report files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rnc_cli_audit";
  fs::remove_all(dir);
  const RunResult r =
      run("aes --key 2b7eaffccbaed2a6abf7cf8b09cf4fd3 --block "
          "3243f6a8885a308d313198a2e0370734 --mode protected-grid --audit " +
          dir.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "protected-grid_trace.csv"));
  CHECK(fs::exists(dir / "protected-grid_report.json"));
  std::ifstream csv(dir / "protected-grid_trace.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "step,segment,width,hex_value,label");
  std::ifstream jsn(dir / "protected-grid_report.json");
  const auto report = nlohmann::json::parse(jsn);
  CHECK(report["segments"].size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("audit runs several keys and emits cross-key flags") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rnc_cli_cross";
  fs::remove_all(dir);
  const RunResult r = run(
      "audit --keys 2b7eaffccbaed2a6abf7cf8b09cf4fd3,"
      "b3ee5ffccbaed2ccabf7cf8bb9cf4fd3 --block "
      "3243f6a8885a308d313198a2e0370734 --out " +
      dir.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "cross_key.json"));
  std::ifstream jsn(dir / "cross_key.json");
  const auto cross = nlohmann::json::parse(jsn);
  CHECK(cross["round_key_word_hits_segments_1_2"] == 0);
  CHECK(cross["flagged_byte_values"].is_array());
  fs::remove_all(dir);

  const RunResult too_few = run(
      "audit --keys 2b7eaffccbaed2a6abf7cf8b09cf4fd3 --block "
      "3243f6a8885a308d313198a2e0370734 --out " +
      dir.string());
  CHECK(too_few.exit_code == 1);
}

TEST_CASE("transform runs the pass end to end") {
  namespace fs = std::filesystem;
  const fs::path in = fs::path(RNC_GOLDEN_DIR) / "const_secret.ir";
  const fs::path out = fs::temp_directory_path() / "rnc_cli_transform.t.ir";
  fs::remove(out);
  const RunResult r = run("--seed 7 transform --in " + in.string() +
                          " --out " + out.string());
  CHECK(r.exit_code == 0);
  std::ifstream result(out);
  REQUIRE(bool(result));
  std::string text((std::istreambuf_iterator<char>(result)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("; transform seed: 7") != std::string::npos);
  CHECK(text.find("@rnc.const") != std::string::npos);
  CHECK(text.find("@rnc.mul") != std::string::npos);
  fs::remove(out);
}

TEST_CASE("attack-calc prints the json report") {
  const RunResult r = run("attack-calc --bits 32 --t-exec 66 --s-cpu 4e9 "
                          "--n-dr 8 --gamma 5");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["combinational_s"].get<double>() ==
        doctest::Approx(566.97).epsilon(0.01));
  CHECK(j["sequential_s"].get<double>() ==
        doctest::Approx(5 * 566.94).epsilon(0.01));
  CHECK(j.contains("annotation"));
  CHECK(j.contains("brute_force_ops"));
}

TEST_CASE("bench writes parseable reports") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rnc_cli_bench";
  fs::remove_all(dir);
  const RunResult r = run(
      "bench --ops add --variants with-rand,without-rand --reps 2 "
      "--max-count 100 --step 100 --out " +
      dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.starts_with("op,variant,count,mean_plain_ns,mean_rnc_ns,"
                             "ratio\n"));
  std::ifstream jsn(dir / "bench.json");
  REQUIRE(bool(jsn));
  const auto j = nlohmann::json::parse(jsn);
  CHECK(j["rows"].size() == 4);  // 2 variants x counts {0, 100}
  fs::remove_all(dir);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("decode").exit_code == 2);  // missing required option
  CHECK(run("").exit_code == 2);        // a subcommand is required
}

TEST_CASE("operational errors exit with 1") {
  CHECK(run("encode --value 9999 --moduli 17,19").exit_code == 1);
  CHECK(run("decode --components 1,2,3 --moduli 17,19").exit_code == 1);
  CHECK(run("transform --in /nonexistent.ir --out /tmp/x.ir").exit_code == 1);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-rnc-binary>\n");
    return 1;
  }
  g_binary = argv[1];
  doctest::Context ctx;
  return ctx.run();
}
