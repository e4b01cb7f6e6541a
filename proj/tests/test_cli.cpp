// Runs the installed command-line binary and inspects exit codes and output.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#ifndef GLOSSFS_CLI
#error "GLOSSFS_CLI must name the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + GLOSSFS_CLI + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

// Per-test scratch directory with a synthetic labelled instance.
struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& tag, const std::string& synth_args) {
    dir = fs::temp_directory_path() / ("glossfs_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    REQUIRE(run("synth --out-dir \"" + dir.string() + "\" " + synth_args).code == 0);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string x() const { return "\"" + (dir / "X.csv").string() + "\""; }
  std::string labels() const { return "\"" + (dir / "labels.csv").string() + "\""; }
  std::string path(const std::string& name) const { return "\"" + (dir / name).string() + "\""; }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("select --input X.csv --kappa 0").code == 2);
  CHECK(run("select --input X.csv --graph star").code == 2);
  CHECK(run("sweep --input X.csv --labels y --out-dir o --kappa-grid 10,abc").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("data errors exit with 1") {
  CHECK(run("select --input /nonexistent/X.csv").code == 1);
  Workspace ws("mismatch", "-n 30 -d 8 --kappa 2 --classes 2 --seed 1");
  std::ofstream(ws.dir / "short.csv") << "0\n1\n0\n";
  CHECK(run("eval --input " + ws.x() + " --labels " + ws.path("short.csv") + " --kappa 2").code == 1);
  CHECK(run("select --input " + ws.x() + " --kappa 9").code == 1);
}

TEST_CASE("select prints a ranking with the documented defaults") {
  Workspace ws("select", "-n 80 -d 60 --kappa 6 --seed 2");
  const auto r = run("select --method gloss --input " + ws.x() + " --kappa 50 --beta 1");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["selected"].size() == 50);
  const auto& c = j["metadata"]["config"];
  CHECK(c["K"] == 100);
  CHECK(c["m"] == 5);
  CHECK(c["max_iter"] == 30);
  CHECK(c["mu"] == 1.0);
  CHECK(c["delta_omega"] == 0.99);
  CHECK(c["beta"] == 1.0);

  const auto out = ws.dir / "sel.json";
  REQUIRE(run("select --method glpsl --input " + ws.x() + " --kappa 6 -o \"" + out.string() + "\"").code == 0);
  CHECK(nlohmann::json::parse(slurp(out))["selected"].size() == 6);
}

TEST_CASE("config precedence: flags over file over defaults") {
  Workspace ws("config", "-n 20 -d 5 --kappa 2 --seed 3");
  std::ofstream(ws.dir / "c.json") << R"({"select": {"beta": 7, "K": 12}, "eval": {"runs": 4}})";
  const std::string cfg = " --config " + ws.path("c.json");
  auto j = nlohmann::json::parse(run("eval --show-config").out);
  CHECK(j["eval"]["runs"] == 20);
  CHECK(j["select"]["K"] == 100);
  j = nlohmann::json::parse(run("eval --show-config" + cfg).out);
  CHECK(j["select"]["beta"] == 7.0);
  CHECK(j["select"]["K"] == 12);
  CHECK(j["eval"]["runs"] == 4);
  j = nlohmann::json::parse(run("eval --show-config --beta 2 --runs 3" + cfg).out);
  CHECK(j["select"]["beta"] == 2.0);
  CHECK(j["select"]["K"] == 12);
  CHECK(j["eval"]["runs"] == 3);

  std::ofstream(ws.dir / "bad.json") << R"({"select": {"colour": 1}})";
  CHECK(run("select --show-config --config " + ws.path("bad.json")).code == 2);
}

TEST_CASE("sweep defaults are the standard grids") {
  const auto j = nlohmann::json::parse(run("sweep --show-config").out);
  CHECK(j["sweep"]["kappa"] == nlohmann::json({20, 30, 40, 50, 60, 70, 80, 90, 100}));
  CHECK(j["sweep"]["beta"] == nlohmann::json({0.01, 0.1, 1, 10, 40, 70, 100}));
}

TEST_CASE("eval on cleanly separated classes, with baselines") {
  Workspace ws("eval", "-n 60 -d 10 --kappa 3 --classes 3 --separation 50 --seed 4");
  const auto r = run("eval --input " + ws.x() + " --labels " + ws.labels() +
                     " --method all --baseline all --baseline random --kappa 3 --runs 5");
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, first, second, third;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  std::getline(lines, third);
  CHECK(header == "method,dataset,kappa,beta,mu,K,m,acc_mean,acc_std,nmi_mean,nmi_std,seconds");
  CHECK(first.rfind("all_features,X,10,", 0) == 0);
  CHECK(first.find(",1.000000,") != std::string::npos);
  CHECK(second.rfind("all_features,", 0) == 0);
  CHECK(third.rfind("random,X,10,", 0) == 0);

  const auto sel = ws.dir / "sel.json";
  REQUIRE(run("select --method glpsl --input " + ws.x() + " --kappa 4 -o \"" + sel.string() + "\"").code == 0);
  const auto from_ranking = run("eval --input " + ws.x() + " --labels " + ws.labels() +
                                " --ranking \"" + sel.string() + "\" --kappa 2 --runs 2");
  CHECK(from_ranking.code == 0);
  CHECK(from_ranking.out.find("\nglpsl,X,2,") != std::string::npos);
}

TEST_CASE("sweep: 2x2 grid gives four rows, deterministically") {
  Workspace ws("sweep", "-n 45 -d 12 --kappa 3 --classes 3 --seed 5");
  const std::string common = "sweep --input " + ws.x() + " --labels " + ws.labels() +
                             " --kappa-grid 3,5 --beta-grid 0.1,10 -K 6 --max-iter 10 --runs 3";
  REQUIRE(run(common + " --jobs 1 --out-dir " + ws.path("a")).code == 0);
  REQUIRE(run(common + " --jobs 3 --out-dir " + ws.path("b")).code == 0);
  const auto a = slurp(ws.dir / "a" / "results.csv");
  CHECK(count_lines(a) == 5);
  CHECK(a == slurp(ws.dir / "b" / "results.csv"));
  const auto matrix = slurp(ws.dir / "a" / "gloss_acc_mean.csv");
  CHECK(matrix.rfind("kappa,beta=0.1,beta=10\n3,", 0) == 0);
  CHECK(count_lines(matrix) == 3);
  CHECK(fs::exists(ws.dir / "a" / "timings.csv"));

  // a cell that cannot run is recorded, the sweep still succeeds
  REQUIRE(run("sweep --input " + ws.x() + " --labels " + ws.labels() +
              " --kappa-grid 3,50 --beta-grid 1 -K 4 --max-iter 5 --runs 2 --out-dir " +
              ws.path("c")).code == 0);
  CHECK(slurp(ws.dir / "c" / "results.csv").find("error: kappa 50") != std::string::npos);
  // every cell failing is an error
  CHECK(run("sweep --input " + ws.x() + " --labels " + ws.labels() +
            " --kappa-grid 50 --beta-grid 1 --runs 2 --out-dir " + ws.path("d")).code == 1);
}

TEST_CASE("verify prints passing reports") {
  const auto r = run("verify --suite all --cases 10");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.size() == 3);
  for (const auto& report : j) CHECK(report["passed"] == true);
}

TEST_CASE("synth writes the instance files") {
  Workspace ws("synth", "-n 25 -d 9 --kappa 3 --noise 0.01 --seed 6");
  CHECK(fs::exists(ws.dir / "X.csv"));
  CHECK(count_lines(slurp(ws.dir / "true_features.csv")) == 3);
  CHECK(count_lines(slurp(ws.dir / "X.csv")) == 25);
}

}  // TEST_SUITE
