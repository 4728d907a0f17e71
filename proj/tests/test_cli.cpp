// Drives the built executable: exit statuses, diagnostics, byte-identical output.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path root = fs::temp_directory_path() / "photonstore_test_cli";

struct Run {
  int status;
  std::string err;
};

Run cli(const std::string& args) {
  const fs::path err = root / "stderr.txt";
  const std::string cmd = std::string(PHOTONSTORE_CLI) + " " + args + " 2>" + err.string() + " >/dev/null";
  const int raw = std::system(cmd.c_str());
  std::ifstream f(err);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

fs::path file(const std::string& name, const std::string& text) {
  fs::create_directories(root);
  const fs::path p = root / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("invalid optical depth: exit 1 with file:line") {
  const fs::path cfg = file("bad_d.cfg", "# storage run\n[params]\nd = 0\n");
  const Run r = cli("store --config " + cfg.string() + " --out " + (root / "bad").string());
  CHECK(r.status == 1);
  CHECK(r.err.find("bad_d.cfg:3") != std::string::npos);
  CHECK(r.err.find("params.d") != std::string::npos);
}

TEST_CASE("unparseable config: exit 1 with file:line") {
  const fs::path cfg = file("garbled.cfg", "[params]\nd = 10\n[grid\n");
  const Run r = cli("store --config " + cfg.string() + " --out " + (root / "garbled").string());
  CHECK(r.status == 1);
  CHECK(r.err.find("garbled.cfg:3") != std::string::npos);
}

TEST_CASE("bad flags: exit 1") {
  CHECK(cli("store --tolerance-profile sloppy").status == 1);
  CHECK(cli("figure 9").status == 1);
  CHECK(cli("").status == 1);
}

TEST_CASE("sweep output is deterministic across jobs and cache state") {
  const fs::path cfg = file("sweep.cfg",
                            "[grid]\nnz = 51\nnt = 801\n[sweep]\nparameter = params.d\nvalues = 2, 5, 20\n"
                            "command = store-retrieve\n");
  const std::string base = "sweep --tolerance-profile fast --config " + cfg.string();
  ::setenv("PHOTONSTORE_CACHE_DIR", (root / "cache").string().c_str(), 1);
  fs::remove_all(root / "cache");
  REQUIRE(cli(base + " --jobs 1 --out " + (root / "s1").string()).status == 0);
  REQUIRE(cli(base + " --jobs 3 --out " + (root / "s2").string()).status == 0);
  REQUIRE(cli(base + " --jobs 2 --no-cache --out " + (root / "s3").string()).status == 0);
  const std::string ref = slurp(root / "s1" / "sweep.csv");
  CHECK(ref.find("eta_total") != std::string::npos);
  CHECK(slurp(root / "s2" / "sweep.csv") == ref);
  CHECK(slurp(root / "s3" / "sweep.csv") == ref);
  CHECK(fs::exists(root / "s2" / "points" / "point_2" / "store_retrieve.summary"));
}

TEST_CASE("figure 2 writes data and its acceptance metric") {
  ::setenv("PHOTONSTORE_CACHE_DIR", (root / "cache").string().c_str(), 1);
  const fs::path out = root / "fig2";
  REQUIRE(cli("figure 2 --tolerance-profile fast --out " + out.string()).status == 0);
  const std::string csv = slurp(out / "figure_2.csv");
  CHECK(csv.rfind("z,S_d0.1,S_d1,S_d10,S_d100,S_d1000,sqrt3z\n", 0) == 0);
  const std::string summary = slurp(out / "figure_2.summary");
  CHECK(summary.find("acceptance.large_d_l2_to_sqrt3z.met=true") != std::string::npos);
}
