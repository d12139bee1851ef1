#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cognate/cli.hpp"

using namespace cognate;

namespace {

const std::string kRoot = COGNATE_SOURCE_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string session_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "cognate-cli-test";
  std::filesystem::remove_all(dir);
  const Run r = cli({"eval", kRoot + "/programs/mavg.cog", "--data", "data=" + kRoot + "/data/mavg.json", "--out",
                     dir.string()});
  REQUIRE(r.code == 0);
  return dir.string();
}

std::vector<std::string> column(const std::string& text, std::size_t k) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string f;
    for (std::size_t i = 0; i <= k && std::getline(fields, f, '\t'); ++i) {
    }
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST_CASE("eval prints the result and graph size") {
  const Run r = cli({"eval", kRoot + "/programs/mavg.cog", "--data", "data=" + kRoot + "/data/mavg.json"});
  CHECK(r.code == 0);
  CHECK(r.out.find("[20.15, 25.813333333333333, 40.18]") == 0);
  CHECK(r.out.find("vertices ") != std::string::npos);
  CHECK(r.out.find("edges ") != std::string::npos);
}

TEST_CASE("eval exit codes") {
  CHECK(cli({"eval", kRoot + "/programs/mavg.cog", "--data", "data=/nonexistent.json"}).code == kExitMissingFile);
  CHECK(cli({"eval", "/nonexistent.cog"}).code == kExitMissingFile);
  CHECK(cli({"eval", kRoot + "/programs/mavg.cog"}).code == kExitMissingFile);
  CHECK(cli({"frobnicate"}).code != 0);
  const Run core = cli({"eval", kRoot + "/programs/mavg.cog", "--dump-core"});
  CHECK(core.code == 0);
  CHECK(core.out.find("letrec") != std::string::npos);
}

TEST_CASE("query resolves paths and restricts results") {
  const std::string dir = session_dir();
  const Run dem = cli({"query", dir, "demands", "out[1]", "--restrict", "inputs"});
  CHECK(dem.code == 0);
  CHECK(column(dem.out, 2) == std::vector<std::string>{"18.17", "22.13", "37.14"});

  const Run linked = cli({"query", dir, "linkedInputs", "data[2]", "--restrict", "inputs"});
  CHECK(column(linked.out, 1) == std::vector<std::string>{"data[0]", "data[1]", "data[2]", "data[3]"});

  const Run by = cli({"query", dir, "demandedBy", "data[2]", "--restrict", "outputs"});
  CHECK(column(by.out, 1) == std::vector<std::string>{"out[1]", "out[2]"});

  // repeated reads are identical
  CHECK(cli({"query", dir, "demandedBy", "data[2]", "--restrict", "outputs"}).out == by.out);

  CHECK(cli({"query", dir, "demandedBy", "out[1]"}).code == kExitResolve);
  CHECK(cli({"query", dir, "demands", "nowhere[0]"}).code == kExitResolve);
  CHECK(cli({"query", dir, "sideways", "out[1]"}).code == kExitFailure);

  const Run dot = cli({"export-dot", dir});
  CHECK(dot.code == 0);
  CHECK(dot.out.find("37.14") != std::string::npos);
  std::filesystem::remove_all(dir);
}
