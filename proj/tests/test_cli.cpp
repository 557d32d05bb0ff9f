#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Workdir {
  fs::path path;
  explicit Workdir(const std::string& name)
      : path(fs::temp_directory_path() / ("star_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~Workdir() { fs::remove_all(path); }
  fs::path operator/(const std::string& f) const { return path / f; }
  std::string str() const { return path.string(); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(STAR_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("build, simulate and emit a block transpose") {
  Workdir w("build");
  REQUIRE(run("build --gen block:20x30 --p-in 6 --p-out 5 --out " + w.str()) == 0);
  for (const char* f : {"trace.txt", "binding.txt", "netlist.txt"}) CHECK(fs::exists(w / f));
  CHECK(slurp(w / "trace.txt").rfind("n=600 p_in=6 p_out=5", 0) == 0);

  const std::string io = " --trace " + (w / "trace.txt").string() + " --netlist " +
                         (w / "netlist.txt").string() + " --out " + w.str();
  CHECK(run("simulate" + io) == 0);
  CHECK(fs::exists(w / "sim_log.txt"));
  CHECK(run("emit" + io) == 0);
  CHECK(slurp(w / "star.vhd").find("entity star_top") != std::string::npos);
  CHECK(slurp(w / "vectors.csv").rfind("cycle,port_kind,port_index,datum\n", 0) == 0);
}

TEST_CASE("a corrupted depth fails simulation") {
  Workdir w("corrupt");
  REQUIRE(run("build --gen reverse:8 --no-fifo --out " + w.str()) == 0);
  const auto text = slurp(w / "netlist.txt");
  REQUIRE(text.find("depth=8") != std::string::npos);
  write(w / "bad.txt", std::regex_replace(text, std::regex("depth=8"), "depth=4"));
  CHECK(run("simulate --trace " + (w / "trace.txt").string() + " --netlist " +
            (w / "bad.txt").string() + " --out " + w.str()) == 5);
}

TEST_CASE("trace subcommand feeds build") {
  Workdir w("trace");
  REQUIRE(run("trace --gen random:50 --seed 3 --p-in 2 --out " + w.str()) == 0);
  const auto trace = (w / "trace.txt").string();
  CHECK(run("build --trace " + trace + " --out " + w.str()) == 0);
  // A trace replaces the permutation source.
  CHECK(run("build --trace " + trace + " --gen identity:4 --out " + w.str()) == 2);
}

TEST_CASE("permutation tables") {
  Workdir w("table");
  write(w / "ok.txt", "n=4\n3\n2\n1\n0\n");
  write(w / "dup.txt", "0 2 1 1\n");
  CHECK(run("build --table " + (w / "ok.txt").string() + " --out " + w.str()) == 0);
  CHECK(run("build --table " + (w / "dup.txt").string() + " --out " + w.str()) == 3);
  CHECK(run("build --table " + (w / "missing.txt").string()) == 2);
}

TEST_CASE("exit codes for bad input") {
  Workdir w("codes");
  CHECK(run("") == 2);
  CHECK(run("build --out " + w.str()) == 2);
  CHECK(run("build --gen bogus:3 --out " + w.str()) == 2);
  CHECK(run("build --gen identity:0 --out " + w.str()) == 3);
  CHECK(run("build --gen identity:4 --min-size 0 --out " + w.str()) == 3);
  CHECK(run("build --gen reverse:4 --no-lifo --no-reg --out " + w.str()) == 4);
  CHECK(run("simulate --out " + w.str()) == 2);
  CHECK(run("build --gen identity:4 --out /proc/forbidden") == 1);
}

TEST_CASE("config file mirrors flags and flags win") {
  Workdir w("config");
  write(w / "star.ini", "gen=block:20x30\np-in=6\np-out=5\nmin-size=4\n");
  const auto cfg = " --config " + (w / "star.ini").string();
  REQUIRE(run("build" + cfg + " --out " + w.str()) == 0);
  CHECK(slurp(w / "trace.txt").rfind("n=600 p_in=6 p_out=5", 0) == 0);

  REQUIRE(run("build" + cfg + " --p-in 3 --out " + w.str()) == 0);
  CHECK(slurp(w / "trace.txt").rfind("n=600 p_in=3 p_out=5", 0) == 0);

  write(w / "typo.ini", "gen=identity:4\np_in=2\n");
  CHECK(run("build --config " + (w / "typo.ini").string() + " --out " + w.str()) == 2);
}

TEST_CASE("sweep and compare write their reports") {
  Workdir w("reports");
  write(w / "grid.txt", "min_size=2,8\nmux_factor=0,1\n");
  REQUIRE(run("sweep --gen block:20x30 --p-in 6 --p-out 5 --grid " + (w / "grid.txt").string() +
              " --out " + w.str()) == 0);
  const auto csv = slurp(w / "sweep.csv");
  CHECK(csv.rfind("config,fifo,lifo,reg,mux,total,memory_points,throughput_mbps,sim_ok\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  REQUIRE(run("compare --gen block:20x30 --p-list 1,2 --out " + w.str()) == 0);
  const auto cmp = slurp(w / "compare.csv");
  CHECK(cmp.rfind("p,star_mem,ram_mem,reg_mem,star_ctrl,ram_ctrl,reg_ctrl\n", 0) == 0);
  CHECK(std::count(cmp.begin(), cmp.end(), '\n') == 3);
  for (const char* f : {"compare_trends.csv", "memory.svg", "control.svg"}) {
    CHECK(fs::exists(w / f));
  }
}
