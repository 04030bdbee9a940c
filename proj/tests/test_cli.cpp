#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(VKPLATE_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path kDir = fs::temp_directory_path() / "vkplate_cli_test";

}  // namespace

TEST_CASE("mesh generate") {
  fs::create_directories(kDir);
  SUBCASE("square family writes a valid 16-cell mesh") {
    const fs::path out = kDir / "m.json";
    CHECK(run("mesh generate --family square --n 4 --domain unit-square -o " + out.string()) ==
          0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("cells").size() == 16);
    CHECK(j.at("vertices").size() == 25);
  }
  SUBCASE("voronoi-random with a fixed seed is byte-identical across runs") {
    const fs::path a = kDir / "a.json", b = kDir / "b.json";
    CHECK(run("mesh generate --family voronoi-random --n 6 --seed 7 -o " + a.string()) == 0);
    CHECK(run("mesh generate --family voronoi-random --n 6 --seed 7 -o " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
  }
  SUBCASE("voronoi on the L-shape is a usage error") {
    CHECK(run("mesh generate --family voronoi-random --domain l-shape --n 4 -o " +
              (kDir / "x.json").string()) != 0);
  }
}

TEST_CASE("solve") {
  fs::create_directories(kDir);
  SUBCASE("square problem on the triangular family") {
    const fs::path out = kDir / "solution.json";
    CHECK(run("solve --problem square --family triangular --n 8 -o " + out.string()) == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("converged").get<bool>());
    CHECK(j.at("iterations").get<int>() <= 3);
    CHECK(j.at("U").size() == j.at("n_dof").get<std::size_t>());
    CHECK(j.at("newton_log").size() == j.at("iterations").get<std::size_t>());
  }
  SUBCASE("solve accepts a mesh file") {
    const fs::path mesh = kDir / "tri.json";
    REQUIRE(run("mesh generate --family triangular --n 4 -o " + mesh.string()) == 0);
    CHECK(run("solve --problem square --mesh " + mesh.string() + " -o " +
              (kDir / "sol2.json").string()) == 0);
  }
  SUBCASE("non-convergence exits nonzero but still writes the log") {
    const fs::path out = kDir / "noconv.json";
    CHECK(run("solve --problem lshape --family triangular --n 2 --max-iter 1 -o " +
              out.string()) != 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK_FALSE(j.at("converged").get<bool>());
    CHECK(j.at("newton_log").size() == 1);
  }
}

TEST_CASE("convergence") {
  fs::create_directories(kDir);
  SUBCASE("two quick levels produce a three-line csv") {
    const fs::path out = kDir / "conv.csv";
    CHECK(run("convergence --problem square --family triangular --levels 2 --n 4 -o " +
              out.string()) == 0);
    std::istringstream in(slurp(out));
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 3);
  }
  SUBCASE("markdown format") {
    const fs::path out = kDir / "conv.md";
    CHECK(run("convergence --problem square --family square --levels 2 --n 4 --format markdown "
              "-o " + out.string()) == 0);
    CHECK(slurp(out).find("err(Hu)") != std::string::npos);
  }
  SUBCASE("level validation") {
    CHECK(run("convergence --problem square --levels 1 -o " + (kDir / "z.csv").string()) != 0);
  }
  SUBCASE("identical config twice is byte-identical") {
    const fs::path a = kDir / "d1.csv", b = kDir / "d2.csv";
    const std::string args =
        "convergence --problem square --family voronoi-random --levels 2 --n 4 --seed 3 "
        "--threads 1 -o ";
    CHECK(run(args + a.string()) == 0);
    CHECK(run(args + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
  }
}
