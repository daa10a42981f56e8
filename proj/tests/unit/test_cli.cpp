#include "sparsedens/cli.hpp"
#include "sparsedens/serialization.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace sparsedens;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "sparsedens");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("sparsedens-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("version and help") {
  const auto v = run({"--version"});
  CHECK(v.code == kExitOk);
  CHECK(v.out.find(std::string(version())) != std::string::npos);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({}).code == kExitConfig);
}

TEST_CASE("estimate writes its outputs and reruns are byte-identical") {
  const auto a = scratch("a"), b = scratch("b");
  const std::vector<std::string> args{"estimate", "--density", "f3", "--dict", "mix", "--n", "200", "--seed", "5"};
  auto first = args, second = args;
  first.insert(first.end(), {"--out-dir", a.string()});
  second.insert(second.end(), {"--out-dir", b.string()});
  const auto r1 = run(first);
  const auto r2 = run(second);
  REQUIRE(r1.code == kExitOk);
  REQUIRE(r2.code == kExitOk);
  CHECK(r1.out == r2.out);
  for (const char* name :
       {"estimate_coefficients.json", "estimate_report.json", "estimate_stats.json", "estimate_curve.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  const auto curve = slurp(a / "estimate_curve.csv");
  CHECK(curve.starts_with("# sparsedens "));
  CHECK(curve.find("\nx,estimate,density\n") != std::string::npos);
  // a different seed changes the digest
  auto third = args;
  third[8] = "6";
  const auto c = scratch("c");
  third.insert(third.end(), {"--out-dir", c.string()});
  REQUIRE(run(third).code == kExitOk);
  const auto digest_line = [](const std::string& text) { return text.substr(0, text.find("\nx,")); };
  CHECK(digest_line(slurp(c / "estimate_curve.csv")) != digest_line(curve));
}

TEST_CASE("estimate from a data file") {
  const auto dir = scratch("data");
  write_file(dir / "x.txt", "0.1 0.2 0.25\n0.3  # comment\n0.35\n0.4 0.45 0.5 0.55 0.6\n0.62 0.7 0.71 0.72 0.8 0.9\n");
  const auto r = run({"estimate", "--data", (dir / "x.txt").string(), "--dict", "haar", "--out-dir", dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("risk") == std::string::npos);
  write_file(dir / "bad.txt", "0.1 0.2 abc\n");
  CHECK(run({"estimate", "--data", (dir / "bad.txt").string(), "--out-dir", dir.string()}).code == kExitConfig);
  write_file(dir / "range.txt", "0.1 0.2 1.5\n");
  CHECK(run({"estimate", "--data", (dir / "range.txt").string(), "--out-dir", dir.string()}).code == kExitConfig);
}

TEST_CASE("configuration errors exit with code 2") {
  const auto dir = scratch("cfg").string();
  CHECK(run({"estimate", "--gamma", "-1", "--out-dir", dir}).code == kExitConfig);
  CHECK(run({"estimate", "--dict", "wavelets", "--out-dir", dir}).code == kExitConfig);
  CHECK(run({"estimate", "--method", "ridge", "--out-dir", dir}).code == kExitConfig);
  CHECK(run({"estimate", "--n", "8", "--out-dir", dir}).code == kExitConfig);
  CHECK(run({"estimate", "--unknown", "--out-dir", dir}).code == kExitConfig);
  CHECK(run({"estimate", "--dict", "mix", "--method", "soft-threshold", "--out-dir", dir}).code == kExitConfig);
  CHECK(run({"calibrate", "--gammas", "0", "--out-dir", dir}).code == kExitConfig);
  CHECK(run({"analyze", "--s", "5", "--n", "16", "--out-dir", dir}).code == kExitConfig);
}

TEST_CASE("solver and budget failures have their own exit codes") {
  const auto dir = scratch("fail").string();
  const auto s = run({"estimate", "--dict", "mix", "--n", "200", "--max-iter", "1", "--out-dir", dir});
  CHECK(s.code == kExitSolver);
  CHECK(s.err.find("max-iter") != std::string::npos);
  const auto b = run({"analyze", "--dict", "haar", "--n", "200", "--s", "4", "--budget", "1000", "--out-dir", dir});
  CHECK(b.code == kExitBudget);
}

TEST_CASE("INI configuration") {
  const auto dir = scratch("ini");
  write_file(dir / "good.ini", "out-dir = " + (dir / "out").string() + "\n[estimate]\nn = 64\ndict = hist\n");
  const auto r = run({"--config", (dir / "good.ini").string(), "estimate"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("dictionary hist (M = 4)") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "estimate_report.json"));
  // flags win over the file
  const auto o = run({"--config", (dir / "good.ini").string(), "estimate", "--dict", "haar"});
  CHECK(o.out.find("dictionary haar (M = 32)") != std::string::npos);
  write_file(dir / "bad.ini", "[estimate]\nbogus = 3\n");
  CHECK(run({"--config", (dir / "bad.ini").string(), "estimate"}).code == kExitConfig);
}

TEST_CASE("analyze and gram") {
  const auto dir = scratch("ana");
  const auto a = run({"analyze", "--dict", "mix", "--n", "16", "--s", "1", "--l-max", "3", "--out-dir", dir.string()});
  REQUIRE(a.code == kExitOk);
  CHECK(fs::exists(dir / "analysis.json"));
  write_file(dir / "g.json", R"({"gram": [[1, 0.9], [0.9, 1]]})");
  const auto j = run({"analyze", "--dict", (dir / "g.json").string(), "--s", "1", "--out-dir", dir.string()});
  REQUIRE(j.code == kExitOk);
  CHECK(j.out.find("false") != std::string::npos);
  write_file(dir / "asym.json", "[[1, 0.5], [0.4, 1]]");
  CHECK(run({"analyze", "--dict", (dir / "asym.json").string(), "--out-dir", dir.string()}).code == kExitConfig);
  const auto g = run({"gram", "--dict", "mix2", "--n", "64", "--out-dir", dir.string()});
  CHECK(g.code == kExitOk);
  CHECK(fs::exists(dir / "gram_summary.json"));
}

TEST_CASE("small calibrate and benchmark runs") {
  const auto dir = scratch("runs");
  const auto c = run({"calibrate", "--gammas", "0.5,1", "--js", "4,5", "--reps", "2", "--out-dir", dir.string()});
  REQUIRE(c.code == kExitOk);
  const auto b = run({"benchmark", "--densities", "f3", "--dicts", "haar", "--n", "64", "--reps", "2", "--threads",
                      "2", "--out-dir", dir.string()});
  REQUIRE(b.code == kExitOk);
  std::size_t csv = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") ++csv;
  CHECK(csv >= 3);
}
