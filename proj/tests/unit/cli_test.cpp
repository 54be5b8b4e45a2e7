#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace hodgekit::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Outcome {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hodgekit-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(invoke({}).code, usage);
  EXPECT_EQ(invoke({"frobnicate"}).code, usage);
  EXPECT_EQ(invoke({"primitive", "corpus:torus8"}).code, usage);
  EXPECT_EQ(invoke({"norms", "corpus:torus8", "x.json", "--bogus"}).code, usage);
  EXPECT_EQ(invoke({"decompose", "corpus:torus8", "x.json", "--metric", "cotan"}).code, usage);
  EXPECT_EQ(invoke({"--help"}).code, ok);
}

TEST_F(Cli, PrimitiveEndToEnd) {
  const std::string mesh = path("torus.off"), w = path("w.json"), a = path("a.json");
  ASSERT_EQ(invoke({"mesh-export", "corpus:torus8", mesh}).code, ok);
  ASSERT_EQ(invoke({"make-cochain", mesh, "--kind", "exact", "--degree", "1", "-o", w}).code, ok);
  const Outcome r = invoke({"primitive", mesh, w});
  ASSERT_EQ(r.code, ok) << r.out << r.err;
  const Json j = r.json();
  EXPECT_EQ(j["schema"], "hodgekit/1");
  EXPECT_EQ(j["config"]["command"], "primitive");
  EXPECT_TRUE(j["all_pass"].get<bool>());
  EXPECT_LE(j["residuals"]["d_residual"].get<double>(), 1e-8);
  EXPECT_LE(j["residuals"]["kernel_component"].get<double>(), 1e-8);
  EXPECT_EQ(j["result"]["primitive"]["degree"], 0);
  EXPECT_EQ(j["result"]["primitive"]["values"].size(), 64u);
}

TEST_F(Cli, NotExactIsDomainFailure) {
  const std::string h = path("h.json");
  ASSERT_EQ(invoke({"make-cochain", "corpus:torus8", "--kind", "harmonic", "--degree", "1", "-o", h}).code, ok);
  const Outcome r = invoke({"primitive", "corpus:torus8", h});
  EXPECT_EQ(r.code, domain_failure);
  const Json j = r.json();
  EXPECT_EQ(j["error"]["code"], "not_exact");
  EXPECT_NE(j["error"]["message"].get<std::string>().find("harmonic"), std::string::npos);
}

TEST_F(Cli, ErrorCodes) {
  EXPECT_EQ(invoke({"norms", "corpus:klein4", "x.json"}).json()["error"]["code"], "unknown_registry");
  EXPECT_EQ(invoke({"norms", path("missing.off"), "x.json"}).json()["error"]["code"], "mesh_unreadable");
  {
    std::ofstream(path("bad.json")) << "{not json";
    const Outcome r = invoke({"norms", "corpus:torus8", path("bad.json")});
    EXPECT_EQ(r.code, domain_failure);
    EXPECT_EQ(r.json()["error"]["code"], "cochain_malformed");
  }
  const std::string w = path("w.json");
  ASSERT_EQ(invoke({"make-cochain", "corpus:torus8", "--kind", "random", "--degree", "1", "-o", w}).code, ok);
  EXPECT_EQ(invoke({"decompose", "corpus:torus16", w}).json()["error"]["code"], "shape_error");
  EXPECT_EQ(invoke({"decompose", "corpus:torus8", w, "--degree", "2"}).json()["error"]["code"], "degree_error");
  EXPECT_EQ(invoke({"norms", "corpus:torus8", w, "--s", "-1"}).json()["error"]["code"], "parameter_error");
  EXPECT_EQ(invoke({"green-norm", "corpus:torus8", "--s", "1"}).json()["error"]["code"], "parameter_error");
  EXPECT_EQ(invoke({"decompose", "corpus:torus8", w, "--metric", "lumped"}).json()["error"]["code"], "scheme_error");
  EXPECT_EQ(invoke({"family-verify", "corpus:torus8", "--family", "sin-sampled"}).json()["error"]["code"],
            "capability_error");
  EXPECT_EQ(invoke({"spectral-compare", "--manifold", "t2", "--form", "nope"}).json()["error"]["code"],
            "unknown_registry");
}

TEST_F(Cli, DecomposeReport) {
  const std::string w = path("w.json");
  ASSERT_EQ(invoke({"make-cochain", "corpus:sphere1", "--kind", "random", "--degree", "1", "-o", w}).code, ok);
  const Outcome r = invoke({"decompose", "corpus:sphere1", w});
  ASSERT_EQ(r.code, ok) << r.out;
  const Json j = r.json();
  EXPECT_TRUE(j["all_pass"].get<bool>());
  EXPECT_LE(j["residuals"]["reconstruction"].get<double>(), 1e-8);
  for (const char* part : {"exact", "coexact", "harmonic"}) EXPECT_TRUE(j["result"].contains(part)) << part;
}

TEST_F(Cli, NormsAndGreenNorm) {
  const std::string w = path("w.json");
  ASSERT_EQ(invoke({"make-cochain", "corpus:torus16", "--kind", "oracle", "--form", "sin_x_dy", "-o", w}).code,
            ok);
  const Outcome n = invoke({"norms", "corpus:torus16", w, "--s", "3", "--k", "1"});
  ASSERT_EQ(n.code, ok) << n.out;
  EXPECT_FALSE(n.json()["result"]["norms"].empty());
  const Outcome g = invoke({"green-norm", "corpus:torus8", "--degree", "1", "--s", "2", "--trials", "10", "--seed", "7"});
  ASSERT_EQ(g.code, ok) << g.out;
  const Json j = g.json();
  EXPECT_EQ(j["result"]["trials"], 10);
  EXPECT_GT(j["result"]["estimate"].get<double>(), 0.0);
}

TEST_F(Cli, FamilyVerifyAndSpectralCompare) {
  const Outcome f = invoke({"family-verify", "corpus:torus8", "--family", "sin", "--scheme", "centered"});
  ASSERT_EQ(f.code, ok) << f.out;
  EXPECT_TRUE(f.json()["all_pass"].get<bool>());
  const Outcome s = invoke({"spectral-compare", "--manifold", "t2", "--form", "cos_x_dxdy", "--resolutions", "8,16,32"});
  ASSERT_EQ(s.code, ok) << s.out;
  EXPECT_EQ(s.json()["result"]["form"], "cos_x_dxdy");
}

TEST_F(Cli, OutputIsDeterministic) {
  const std::vector<std::string> cmd = {"green-norm", "corpus:sphere1", "--degree", "2", "--s", "3",
                                        "--trials", "16", "--seed", "11"};
  const Outcome a = invoke(cmd), b = invoke(cmd);
  ASSERT_EQ(a.code, ok);
  EXPECT_EQ(a.out, b.out);
  auto with_file = cmd;
  with_file.insert(with_file.end(), {"-o", path("g.json")});
  ASSERT_EQ(invoke(with_file).code, ok);
  std::ifstream in(path("g.json"));
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), a.out);
}

}  // namespace
}  // namespace hodgekit::cli
