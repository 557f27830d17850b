// Drives the built command-line binary through a shell.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "cesc_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Result run(const std::string& args) {
  const fs::path dir = work_dir();
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd =
      std::string("\"") + CESC_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("cluster writes labels and a report") {
  const fs::path out = work_dir() / "moons.labels";
  const Result r = run("cluster --input synth:two_moons --reference exact --out \"" + out.string() + "\"");
  REQUIRE(r.status == 0);
  CHECK(line_count(slurp(out)) == 1000);
  const auto report = nlohmann::json::parse(slurp(out.string() + ".report.json"));
  CHECK(report["accuracy"]["vs_exact"].get<double>() >= 0.95);
  CHECK(report["params"]["k_rp"] == 50);
  CHECK(report["params"]["k1"] == 10);
  CHECK(report["params"]["reps"] == 5);
  CHECK(report["params"]["max_iter"] == 100);
  CHECK(r.err.find("embedding") != std::string::npos);
}

TEST_CASE("labels are byte-identical across thread counts") {
  const Result a = run("cluster --input synth:text_mask --n 2000 --seed 4 --threads 1");
  const Result b = run("cluster --input synth:text_mask --n 2000 --seed 4 --threads 4");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(a.out == b.out);
  CHECK(line_count(a.out) == 2000);
}

TEST_CASE("eval scores label files") {
  const fs::path dir = work_dir();
  std::ofstream(dir / "p.txt") << "1\n1\n0\n0\n-1\n";
  std::ofstream(dir / "r.txt") << "0\n0\n1\n1\n1\n";
  const Result r = run("eval \"" + (dir / "p.txt").string() + "\" \"" + (dir / "r.txt").string() + "\"");
  REQUIRE(r.status == 0);
  CHECK(r.out == "1.000000\n");
  std::ofstream(dir / "short.txt") << "0\n";
  CHECK(run("eval \"" + (dir / "p.txt").string() + "\" \"" + (dir / "short.txt").string() + "\"").status != 0);
}

TEST_CASE("embed writes one row per node") {
  const Result r = run("embed --input synth:blobs --n 150 --krp 12");
  REQUIRE(r.status == 0);
  CHECK(line_count(r.out) == 150);
  const std::string first = r.out.substr(0, r.out.find('\n'));
  CHECK(std::count(first.begin(), first.end(), ',') == 11);
}

TEST_CASE("sweep with a single k_RP gives a single row") {
  const Result r = run("sweep-krp --input synth:two_moons --n 300 --krp-list 40");
  REQUIRE(r.status == 0);
  CHECK(line_count(r.out) == 2);
  CHECK(r.out.rfind("k_rp,", 0) == 0);
}

TEST_CASE("bench reports the exponent") {
  const Result r = run("bench --input synth:two_moons --sizes 200,400");
  REQUIRE(r.status == 0);
  CHECK(line_count(r.out) == 3);
  CHECK(r.err.find("exponent") != std::string::npos);
}

TEST_CASE("errors exit nonzero and leave no output") {
  const fs::path out = work_dir() / "missing.labels";
  fs::remove(out);
  const Result r = run("cluster --input /nonexistent/points.csv --out \"" + out.string() + "\"");
  CHECK(r.status != 0);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
  CHECK(run("cluster --input synth:two_moons --krp 0").status != 0);
  CHECK(run("cluster --bogus-flag").status != 0);
  CHECK(run("").status != 0);
  CHECK(run("cluster --input synth:two_moons --n 50 --k 51").status != 0);
}

TEST_CASE("cleanup") { fs::remove_all(work_dir()); }
