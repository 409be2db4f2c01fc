#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "mfp/cli.hpp"
#include "mfp/io.hpp"
#include "mfp/synthetic.hpp"

namespace mfp {
namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, HelpAndUsageErrors) {
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("modulate"), std::string::npos);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  const auto no_manifest = run({"eval"});
  EXPECT_EQ(no_manifest.code, 1);
  EXPECT_NE(no_manifest.err.find("--manifest"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--image", "a.png", "--mask", "b.png", "--max-clicks", "0"}).code, 1);
}

TEST(Cli, RuntimeErrorsExitTwo) {
  const auto missing = run({"eval", "--manifest", "/nonexistent/manifest.json"});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("manifest"), std::string::npos);
  const auto dir = test::scratch_dir("cli_bad_config");
  io::write_text(dir / "c.json", R"({"jobz": 2})");
  EXPECT_EQ(run({"eval", "--manifest", "/x.json", "--config", (dir / "c.json").string()}).code, 2);
}

TEST(Cli, ModulateMatchesGoldenOutput) {
  const auto fx = test::fixture_dir() / "modulate";
  const auto dir = test::scratch_dir("cli_modulate");
  const auto r = run({"modulate", "--in", (fx / "input.grid").string(), "--clicks", (fx / "clicks.txt").string(),
                      "--out", (dir / "out.grid").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_file(dir / "out.grid"), io::read_file(fx / "expected.grid"));
}

TEST(Cli, ModulateRejectsOutOfBoundsClick) {
  const auto dir = test::scratch_dir("cli_modulate_oob");
  io::write_grid(dir / "in.grid", ProbabilityGrid(Size{4, 4}, 0.5));
  io::write_text(dir / "clicks.txt", "9 9 fg 1\n");
  EXPECT_EQ(run({"modulate", "--in", (dir / "in.grid").string(), "--clicks", (dir / "clicks.txt").string(), "--out",
                 (dir / "out.grid").string()})
                .code,
            2);
}

TEST(Cli, SimulateWritesTrajectoryAndDumps) {
  const auto dir = test::scratch_dir("cli_simulate");
  const auto m = write_synthetic_dataset(dir / "data", "syn", {32, 32});
  const auto& s = m.samples[3];
  const auto r = run({"simulate", "--image", s.image.string(), "--mask", s.mask.string(), "--max-clicks", "3",
                      "--dump-dir", (dir / "dump").string(), "--out", (dir / "t.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = test::read_json(dir / "t.json");
  ASSERT_GE(j["rounds"].size(), 1u);
  ASSERT_LE(j["rounds"].size(), 3u);
  EXPECT_EQ(j["ious"].size(), j["rounds"].size());
  EXPECT_TRUE(std::filesystem::exists(dir / "dump" / "round_01_p.grid"));
  EXPECT_TRUE(std::filesystem::exists(dir / "dump" / "round_01_p_mod.grid"));
  EXPECT_TRUE(std::filesystem::exists(dir / "dump" / "round_01_mask.png"));
}

TEST(Cli, EvalMatchesLibraryReport) {
  const auto dir = test::scratch_dir("cli_eval");
  const auto m = write_synthetic_dataset(dir, "syn", {32, 32});
  const auto r = run({"eval", "--manifest", (dir / "syn.json").string(), "--out", (dir / "report.json").string(),
                      "--csv-prefix", (dir / "r_").string(), "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("NoC@90"), std::string::npos);
  const auto text = test::read_text(dir / "report.json");
  EXPECT_EQ(text, report_to_string(run_benchmark(load_manifest(dir / "syn.json"), EvalConfig{})));
  EXPECT_TRUE(std::filesystem::exists(dir / "r_noc.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "r_miou.csv"));
}

TEST(Cli, ImportDatasetBuildsManifest) {
  const auto dir = test::scratch_dir("cli_import");
  const auto suite = synthetic_suite({16, 16});
  std::filesystem::create_directories(dir / "img");
  std::filesystem::create_directories(dir / "gt");
  for (std::size_t i = 0; i < 3; ++i) {
    io::write_image_png(dir / "img" / (suite[i].id + ".png"), suite[i].image);
    io::write_mask_png(dir / "gt" / (suite[i].id + "_mask.png"), suite[i].mask);
  }
  io::write_image_png(dir / "img" / "orphan.png", suite[4].image);
  const auto r = run({"import-dataset", "--images", (dir / "img").string(), "--masks", (dir / "gt").string(),
                      "--mask-suffix", "_mask", "--name", "mine", "--out", (dir / "mine.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("orphan.png"), std::string::npos);
  const auto m = load_manifest(dir / "mine.json");
  EXPECT_EQ(m.name, "mine");
  EXPECT_EQ(m.samples.size(), 3u);

  const auto syn = run({"import-dataset", "--synthetic", (dir / "syn").string()});
  ASSERT_EQ(syn.code, 0) << syn.err;
  EXPECT_EQ(load_manifest(dir / "syn" / "dataset.json").samples.size(), 10u);
}

}  // namespace
}  // namespace mfp
