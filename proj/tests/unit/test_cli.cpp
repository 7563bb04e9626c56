#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cscale/cli.hpp"

using namespace cscale;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "cscale");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("metric at the center of the ball") {
  const auto o = call({"metric", "--domain", "ball", "--point", "0,0", "--xi", "1,0", "--no-timestamp"});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j["schema"] == 1);
  CHECK(j["report"]["value"].get<double>() == doctest::Approx(1.0));
  CHECK(j["config"]["point"] == "0,0");
  CHECK(j["config"]["domain"] == "ball");
  CHECK_FALSE(j.contains("timestamp"));
}

TEST_CASE("finite type of egg(3)") {
  const auto o = call({"type", "--domain", "egg", "--k", "3", "--point", "1,0", "--no-timestamp"});
  REQUIRE(o.code == 0);
  CHECK(nlohmann::json::parse(o.out)["report"]["finite_type"] == 6);
}

TEST_CASE("reports are deterministic without timestamps") {
  const std::vector<std::string> args = {"scale", "--seed", "5", "--no-timestamp"};
  CHECK(call(args).out == call(args).out);
  CHECK(nlohmann::json::parse(call({"levi"}).out).contains("timestamp"));
}

TEST_CASE("exit codes") {
  CHECK(call({"frobnicate"}).code == 1);
  CHECK(call({}).code == 1);
  const auto bad = call({"metric", "--set", "bogus=1"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("bogus") != std::string::npos);
  const auto malformed = call({"metric", "--dim", "two"});
  CHECK(malformed.code == 1);
  CHECK(malformed.err.find("dim") != std::string::npos);
  CHECK(call({"metric", "--format", "xml"}).code == 1);
  // a tolerance below the truncation error turns the verdict into a failure
  CHECK(call({"klembeck", "--trunc", "32", "--tol", "1e-12"}).code == 2);
}

TEST_CASE("config file with flag override") {
  const std::string path = "cli_test_config.txt";
  {
    std::ofstream f(path);
    f << "# metric query\ndomain = ball\npoint = 0.5,0\nxi = 0,1\n";
  }
  const auto a = nlohmann::json::parse(call({"metric", "--config", path, "--no-timestamp"}).out);
  CHECK(a["report"]["value"].get<double>() == doctest::Approx(1 / std::sqrt(0.75)));
  const auto b = nlohmann::json::parse(call({"metric", "--config", path, "--point", "0,0", "--no-timestamp"}).out);
  CHECK(b["report"]["value"].get<double>() == doctest::Approx(1.0));
  CHECK(b["config"]["point"] == "0,0");
  std::remove(path.c_str());
}

TEST_CASE("csv output") {
  const auto o = call({"graham", "--format", "csv"});
  CHECK(o.code == 0);
  CHECK(o.out.rfind("t,d,F,dF,sqrt_dF,lee_ratio\n", 0) == 0);
  const auto k = call({"bergman", "--format", "csv", "--trunc", "4"});
  CHECK(k.out.rfind("alpha,c_alpha\n", 0) == 0);
}

TEST_CASE("every command runs with defaults") {
  for (const auto& c : command_names()) {
    if (c == "wu" || c == "kernel-convergence") continue;
    const auto o = call({c, "--no-timestamp"});
    INFO(c << ": " << o.err);
    CHECK(o.code != 1);
  }
}
