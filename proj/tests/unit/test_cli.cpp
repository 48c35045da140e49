#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "synthmet/weather.hpp"

using namespace synthmet;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const fs::path& dir, const std::string& args, const std::string& stdin_text = "") {
  const auto in = dir / ".stdin", out = dir / ".stdout", err = dir / ".stderr";
  { std::ofstream(in) << stdin_text; }
  const std::string cmd = "cd '" + dir.string() + "' && SOURCE_DATE_EPOCH=1700000000 '" SYNTHMET_CLI "' " + args +
                          " < .stdin > .stdout 2> .stderr";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, fixtures::read_file(out), fixtures::read_file(err)};
}

std::string sha256sum(const fs::path& p) {
  const std::string cmd = "sha256sum '" + p.string() + "'";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  std::array<char, 128> buf{};
  std::string text;
  while (fgets(buf.data(), buf.size(), pipe.get())) text += buf.data();
  return text.substr(0, 64);
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<fixtures::TempDir>("cli");
    write_weather_csv(fixtures::synthetic_year(80, 240), dir_->path() / "site.csv");
  }
  static void TearDownTestSuite() { dir_.reset(); }
  const fs::path& dir() const { return dir_->path(); }
  static std::unique_ptr<fixtures::TempDir> dir_;
};

std::unique_ptr<fixtures::TempDir> Cli::dir_;

}  // namespace

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run(dir(), "--help").code, 0);
  EXPECT_EQ(run(dir(), "").code, 2);
  EXPECT_EQ(run(dir(), "describe site.csv --var pressure").code, 2);
  EXPECT_EQ(run(dir(), "describe missing.csv").code, 2);
  EXPECT_EQ(run(dir(), "fit site.csv --model ar --var temp --order 7 --out lib").code, 2);
  EXPECT_EQ(run(dir(), "search site.csv --criteria qmean:1:2").code, 2);
  const auto r = run(dir(), "frobnicate");
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, DataErrorsExitWithOne) {
  std::ofstream(dir() / "bad.csv") << "#site,x,lat,0,lon,0,alt,0\n#start,2001-01-01T00:00\n#step,1h\nnot,a,header\n";
  const auto r = run(dir(), "describe bad.csv");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("header"), std::string::npos);
}

TEST_F(Cli, DescribeWritesReportAndManifest) {
  const auto r = run(dir(), "describe site.csv --var temp --indicator mean --bins 8 --against ghi:daily-total --out desc");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"report.txt", "histogram.csv", "summary.json", "describe.manifest.json"})
    EXPECT_TRUE(fs::exists(dir() / "desc" / f)) << f;
  const auto m = nlohmann::json::parse(fixtures::read_file(dir() / "desc" / "describe.manifest.json"));
  EXPECT_EQ(m["subcommand"], "describe");
  EXPECT_EQ(m["timestamp"], "2023-11-14T22:13:20Z");
  ASSERT_EQ(m["inputs"].size(), 1u);
  EXPECT_EQ(m["inputs"][0]["sha256"], sha256sum(dir() / "site.csv"));
}

TEST_F(Cli, FitGenerateSimulatePipelineIsDeterministic) {
  for (const char* fit : {"--model clearness", "--model weibull", "--model ar --var kt", "--model ar --var wind",
                          "--model correlation:erbs", "--model correlation:page --published",
                          "--model mlp --epochs 3"}) {
    const auto r = run(dir(), std::string("fit site.csv --out lib ") + fit);
    ASSERT_EQ(r.code, 0) << fit << ": " << r.err;
  }
  const auto gen = "generate --library lib --days 20 --seed 5 --target kt=0.6 --target wind=4:0.3";
  ASSERT_EQ(run(dir(), std::string(gen) + " --out a.csv").code, 0);
  ASSERT_EQ(run(dir(), std::string(gen) + " --out b.csv").code, 0);
  EXPECT_EQ(fixtures::read_file(dir() / "a.csv"), fixtures::read_file(dir() / "b.csv"));
  const auto series = parse_weather_csv(dir() / "a.csv");
  EXPECT_EQ(series.size(), 20u * 24);
  EXPECT_TRUE(series.has(Variable::temp));
  const auto m = nlohmann::json::parse(fixtures::read_file(dir() / "a.csv.manifest.json"));
  EXPECT_EQ(m["seed"], 5);
  EXPECT_EQ(m["run"]["targets"].size(), 2u);
  for (const auto& in : m["inputs"]) EXPECT_EQ(in["sha256"], sha256sum(dir() / in["path"].get<std::string>()));

  ASSERT_EQ(run(dir(), "simulate --weather a.csv --out sim1").code, 0);
  ASSERT_EQ(run(dir(), "simulate --weather a.csv --out sim2").code, 0);
  for (const char* f : {"loads.csv", "comfort.csv"})
    EXPECT_EQ(fixtures::read_file(dir() / "sim1" / f), fixtures::read_file(dir() / "sim2" / f)) << f;
  EXPECT_EQ(fixtures::read_file(dir() / "sim1" / "comfort.csv").rfind("zone_model,comfort_zone,fraction", 0), 0u);

  const auto unreachable = run(dir(), "generate --library lib --days 2 --target kt=1.5");
  EXPECT_EQ(unreachable.code, 2);
}

TEST_F(Cli, InteractiveChoiceReadsStdin) {
  ASSERT_EQ(run(dir(), "fit site.csv --out lib2 --model clearness").code, 0);
  ASSERT_EQ(run(dir(), "fit site.csv --out lib2 --model weibull").code, 0);
  ASSERT_EQ(run(dir(), "fit site.csv --out lib2 --model correlation:page --published --id kd-a").code, 0);
  ASSERT_EQ(run(dir(), "fit site.csv --out lib2 --model correlation:liu_jordan --published --id kd-b").code, 0);
  const auto r = run(dir(), "generate --library lib2 --days 3 --vars ghi,dhi --interactive --out i.csv", "2\n");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("kd-a"), std::string::npos);
  EXPECT_NE(r.err.find("kd-b"), std::string::npos);
  const auto m = nlohmann::json::parse(fixtures::read_file(dir() / "i.csv.manifest.json"));
  bool used_b = false;
  for (const auto& s : m["run"]["plan"]["steps"]) used_b |= s["producer"] == "kd-b";
  EXPECT_TRUE(used_b);
}

TEST_F(Cli, ClassifySearchDeriveExtrapolateInit) {
  ASSERT_EQ(run(dir(), "classify site.csv --vars ghi,temp --k 3 --out cls").code, 0);
  EXPECT_EQ(nlohmann::json::parse(fixtures::read_file(dir() / "cls" / "classes.json"))["joint"]["classes"].size(), 3u);
  EXPECT_TRUE(fs::exists(dir() / "cls" / "representative.csv"));
  ASSERT_EQ(run(dir(), "search site.csv --criteria tmean:20:35 --len 2 --no-overlap --out seq.csv").code, 0);
  EXPECT_EQ(fixtures::read_file(dir() / "seq.csv").rfind("rank,start,end,days,tmean", 0), 0u);
  ASSERT_EQ(run(dir(), "derive site.csv --out derived.csv").code, 0);
  EXPECT_NE(fixtures::read_file(dir() / "derived.csv").find("tsky_C"), std::string::npos);
  ASSERT_EQ(run(dir(), "extrapolate site.csv --lat -21.1 --lon 55.5 --alt 800 --out high.csv").code, 0);
  EXPECT_EQ(parse_weather_csv(dir() / "high.csv").site().altitude, 800.0);
  EXPECT_EQ(run(dir(), "extrapolate site.csv --lat -21.1 --lon 55.5").code, 2);
  ASSERT_EQ(run(dir(), "init-building --out bld").code, 0);
  const auto sim = run(dir(), "simulate --building bld/demo_building.json --comfort bld/comfort_zones.json "
                              "--weather site.csv --out sim3");
  EXPECT_EQ(sim.code, 0) << sim.err;
}
