#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "tropedge/tropedge.h"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(TROPEDGE_CLI) + "' " + args + " 2>&1";
  CliRun r{-1, ""};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tropedge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out() const { return "'" + dir_.string() + "'"; }
  static std::string data(const std::string& name) { return "'" + std::string(TROPEDGE_TEST_DATA) + "/" + name + "'"; }
  std::size_t file_count() const {
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir_)) ++n;
    return n;
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

int image_width(const fs::path& p) {
  te_image* img = nullptr;
  if (te_image_load(p.c_str(), &img) != TE_OK) return -1;
  const int w = te_image_width(img);
  te_image_free(img);
  return w;
}

}  // namespace

TEST_F(CliTest, DetectWritesOnePng) {
  const CliRun r = cli("detect -i " + data("coins.png") + " -m 4k-max -o " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "coins_4k-max.png"));
  EXPECT_EQ(file_count(), 1u);
}

TEST_F(CliTest, DetectSavesIntermediates) {
  const CliRun r = cli("detect -i " + data("coins.png") + " -m tg-canny --save-intermediates -o " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "coins_tg-canny.png"));
  EXPECT_TRUE(fs::exists(dir_ / "coins_tg-canny_gray.png"));
  EXPECT_TRUE(fs::exists(dir_ / "coins_tg-canny_suppressed.png"));
  EXPECT_GT(file_count(), 3u);
}

TEST_F(CliTest, DetectErrors) {
  CliRun r = cli("detect -i /nonexistent/x.png -m 4k-max -o " + out());
  EXPECT_EQ(r.code, 2) << r.out;
  r = cli("detect -i " + data("coins.png") + " -m bogus -o " + out());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("bogus"), std::string::npos);
  r = cli("detect -i " + data("coins.png") + " -m 4k-max --window 4 -o " + out());
  EXPECT_EQ(r.code, 2) << r.out;
  r = cli("detect -i " + data("coins.png") + " -m 4k-max --format xml -o " + out());
  EXPECT_EQ(r.code, 2) << r.out;
  r = cli("detect -m 4k-max");
  EXPECT_EQ(r.code, 2) << r.out;
}

TEST_F(CliTest, CompareFilesMontageAndReportOrder) {
  const CliRun r = cli("compare -i " + data("camera.png") + " -m tg-sobel -m 8k-min -m canny -o " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* f : {"camera_tg-sobel.png", "camera_8k-min.png", "camera_canny.png", "camera_montage.png",
                        "camera_report.csv"})
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  EXPECT_EQ(file_count(), 5u);
  const int w = image_width(dir_ / "camera_8k-min.png");
  EXPECT_EQ(image_width(dir_ / "camera_montage.png"), 4 * w);
  const std::string csv = slurp(dir_ / "camera_report.csv");
  const auto a = csv.find("camera,tg-sobel,");
  const auto b = csv.find("camera,8k-min,");
  const auto c = csv.find("camera,canny,");
  ASSERT_NE(a, std::string::npos);
  EXPECT_LT(a, b);
  EXPECT_LT(b, c);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST_F(CliTest, CompareJsonAndOverrides) {
  const CliRun r = cli("compare -i " + data("coins.png") +
                    " -m random-max -m 4k-max --seed 9 --scales 0.4,1.6 --set 4k-max:enhance.min_area=4 "
                    "--paper-protocol --format json -o " +
                    out());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(dir_ / "coins_report.json"));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["params"]["seed"], "9");
  EXPECT_EQ(j[0]["params"]["scales.small"], "0.4");
  EXPECT_EQ(j[0]["params"]["paper_protocol"], "true");
  EXPECT_EQ(j[0]["params"]["enhance.min_area"], "8");
  EXPECT_EQ(j[1]["params"]["enhance.min_area"], "4");
  EXPECT_EQ(image_width(dir_ / "coins_4k-max.png"), 400);
}

TEST_F(CliTest, CompareNeedsTwoMethods) {
  EXPECT_EQ(cli("compare -i " + data("coins.png") + " -m 4k-max -o " + out()).code, 2);
}

TEST_F(CliTest, ConfigFileApplies) {
  std::ofstream(dir_ / "run.conf") << "threshold = 0.5\n[sobel]\nenhance.thin = false\n";
  const CliRun r = cli("compare -i " + data("coins.png") + " -m sobel -m tg-sobel --format json --config '" +
                    (dir_ / "run.conf").string() + "' -o " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(slurp(dir_ / "coins_report.json"));
  EXPECT_EQ(j[0]["params"]["threshold.mode"], "global");
  EXPECT_EQ(j[0]["params"]["enhance.thin"], "false");
  EXPECT_EQ(j[1]["params"]["enhance.thin"], "true");
  EXPECT_EQ(cli("detect -i " + data("coins.png") + " -m sobel --config /nonexistent.conf -o " + out()).code, 2);
  EXPECT_EQ(cli("detect -i " + data("coins.png") + " -m sobel --set bogus:seed=1 -o " + out()).code, 3);
}

TEST_F(CliTest, BenchRowsTimingsAndEmptyDir) {
  fs::create_directories(dir_ / "imgs");
  for (const char* f : {"coins.png", "camera.png"})
    fs::copy_file(fs::path(TROPEDGE_TEST_DATA) / f, dir_ / "imgs" / f);
  std::ofstream(dir_ / "imgs" / "notes.txt") << "ignored";
  const CliRun r = cli("bench -i '" + (dir_ / "imgs").string() + "' -m sobel -m tg-log -m 8k-min -o " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(dir_ / "bench.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_NE(line.find("params,wall_ms"), std::string::npos);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const double ms = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_GT(ms, 0.0);
  }
  EXPECT_EQ(rows, 6);

  fs::create_directories(dir_ / "empty");
  EXPECT_EQ(cli("bench -i '" + (dir_ / "empty").string() + "' -o " + out()).code, 4);
  EXPECT_EQ(cli("bench -i /nonexistent/dir -o " + out()).code, 2);
}

TEST_F(CliTest, MetricsSubcommand) {
  CliRun r = cli("metrics -i " + data("coins.png") + " --edges " + data("coins.png") + " -o " + out());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("coins,edge-map,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "coins_metrics.csv"));


  const double px[] = {0.5, 0.5, 0.5, 0.5};
  const double ex[] = {1.0, 0.0, 0.0, 1.0};
  te_image* flat = nullptr;
  te_image* edges = nullptr;
  ASSERT_EQ(te_image_from_gray(px, 2, 2, &flat), TE_OK);
  ASSERT_EQ(te_image_from_gray(ex, 2, 2, &edges), TE_OK);
  ASSERT_EQ(te_image_save(flat, (dir_ / "flat.png").c_str()), TE_OK);
  ASSERT_EQ(te_image_save(edges, (dir_ / "edges.png").c_str()), TE_OK);
  te_image_free(flat);
  te_image_free(edges);
  r = cli("metrics -i " + data("coins.png") + " --edges '" + (dir_ / "edges.png").string() + "'");
  EXPECT_EQ(r.code, 5) << r.out;
  r = cli("metrics -i '" + (dir_ / "flat.png").string() + "' --edges '" + (dir_ / "edges.png").string() +
          "' --format json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j[0]["params"]["flag.correlation_orig"], "undefined");
  EXPECT_TRUE(j[0]["contrast_ratio"].is_null());
}

TEST_F(CliTest, BenchDeterministicAcrossThreadCounts) {
  fs::create_directories(dir_ / "imgs");
  for (const char* f : {"coins.png", "camera.png", "coffee.png"})
    fs::copy_file(fs::path(TROPEDGE_TEST_DATA) / f, dir_ / "imgs" / f);
  const std::string base = "bench -i '" + (dir_ / "imgs").string() + "' -m random-max -m tg-canny --seed 3 -o ";
  ASSERT_EQ(cli(base + "'" + (dir_ / "one").string() + "'", "TROPEDGE_THREADS=1").code, 0);
  ASSERT_EQ(cli(base + "'" + (dir_ / "many").string() + "'", "TROPEDGE_THREADS=3").code, 0);
  auto strip = [](const std::string& csv) {
    std::stringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  const std::string a = strip(slurp(dir_ / "one" / "bench.csv"));
  EXPECT_EQ(a, strip(slurp(dir_ / "many" / "bench.csv")));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 7);
  EXPECT_EQ(cli(base + out(), "TROPEDGE_THREADS=zero").code, 2);
}
