#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "hcmc/clip_io.hpp"

namespace fs = std::filesystem;
using hcmc::read_text_file;
using hcmc::write_text_file;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = hcmc::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hcmc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Result gen(const std::string& out, const std::string& seed = "3") {
    return run({"gen", "--clips", "40", "--clips-per-movie", "5", "--seed", seed, "--out", path(out)});
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, hcmc::cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, hcmc::cli::kExitUsage);
  EXPECT_EQ(run({"gen", "--clips", "many"}).code, hcmc::cli::kExitUsage);
  EXPECT_EQ(run({"train"}).code, hcmc::cli::kExitUsage);
}

TEST_F(CliTest, MissingInputsExitOne) {
  const auto r = run({"eval", "--data", path("nope.jsonl"), "--manifest", path("m.json")});
  EXPECT_EQ(r.code, hcmc::cli::kExitIo);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, GenIsDeterministicAndWritesManifest) {
  ASSERT_EQ(gen("a").code, 0);
  ASSERT_EQ(gen("b").code, 0);
  for (const char* split : {"train.jsonl", "val.jsonl", "test_in.jsonl", "test_out.jsonl", "dataset.json"}) {
    EXPECT_EQ(read_text_file(dir_ / "a" / split), read_text_file(dir_ / "b" / split)) << split;
  }
  ASSERT_EQ(gen("c", "4").code, 0);
  EXPECT_NE(read_text_file(dir_ / "a" / "train.jsonl"), read_text_file(dir_ / "c" / "train.jsonl"));

  const auto manifest = nlohmann::json::parse(read_text_file(dir_ / "a" / "gen.manifest.json"));
  EXPECT_EQ(manifest.at("command"), "gen");
  EXPECT_EQ(manifest.at("seed"), 3);
  EXPECT_EQ(manifest.at("outputs").size(), 5u);
  EXPECT_EQ(manifest.at("outputs")[0].at("fnv1a64").get<std::string>().size(), 16u);
}

TEST_F(CliTest, EvalIdentityOnTemporalClipsIsPerfect) {
  ASSERT_EQ(gen("d").code, 0);
  // Sort every clip back into temporal order so the identity prediction is exact.
  auto clips = hcmc::read_clips_jsonl(dir_ / "d" / "test_in.jsonl");
  for (auto& c : clips) c.frames = hcmc::ground_truth_permutation(c).apply(c.frames);
  hcmc::write_clips_jsonl(dir_ / "sorted.jsonl", clips);
  const auto r = run({"eval", "--data", path("sorted.jsonl"), "--pred", "identity", "--out", path("t.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto table = read_text_file(dir_ / "t.csv");
  EXPECT_EQ(table.substr(0, table.find('\n')), "split,beta,n_clips,score,scene_iou,shot_iou");
  EXPECT_NE(table.find(",2," + std::to_string(clips.size()) + ",100.0000"), std::string::npos) << table;
  EXPECT_NE(table.find(",3," + std::to_string(clips.size()) + ",100.0000"), std::string::npos) << table;
}

TEST_F(CliTest, TrainInferEvalRoundTrip) {
  ASSERT_EQ(gen("e").code, 0);
  const std::vector<std::string> train{"train", "--data", path("e/train.jsonl"), "--epochs", "1", "--hidden-dim", "16",
                                       "--proj-dim", "8", "--out", path("model")};
  ASSERT_EQ(run(train).code, 0);
  const auto r = run({"infer", "--model", path("model/model.ckpt"), "--data", path("e/test_in.jsonl"), "--out",
                      path("pred.jsonl"), "--level-mode", "frame_shot", "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("pred.jsonl.manifest.json")));
  const auto e = run({"eval", "--data", path("e/test_in.jsonl"), "--pred", path("pred.jsonl"), "--out", path("s.csv")});
  ASSERT_EQ(e.code, 0) << e.err;
  const auto m = run({"eval", "--data", path("e/test_in.jsonl"), "--model", path("model/model.ckpt"), "--level-mode",
                      "frame_shot", "--out", path("s2.csv")});
  ASSERT_EQ(m.code, 0) << m.err;
  // Same scores; the model path also fills the cluster IoU columns.
  auto score_columns = [](const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
      std::size_t cut = 0;
      for (int k = 0; k < 4; ++k) cut = line.find(',', cut) + 1;
      rows.push_back(line.substr(0, cut));
    }
    return rows;
  };
  EXPECT_EQ(score_columns(read_text_file(dir_ / "s.csv")), score_columns(read_text_file(dir_ / "s2.csv")));
}

TEST_F(CliTest, ConfigFileAndExplicitFlags) {
  write_text_file(dir_ / "cfg.json", R"({"clips": 10, "clips_per_movie": 2, "seed": 9})");
  ASSERT_EQ(run({"gen", "--config", path("cfg.json"), "--out", path("f")}).code, 0);
  EXPECT_EQ(nlohmann::json::parse(read_text_file(dir_ / "f" / "dataset.json")).at("n_clips"), 10);
  ASSERT_EQ(run({"gen", "--config", path("cfg.json"), "--clips", "12", "--out", path("g")}).code, 0);
  EXPECT_EQ(nlohmann::json::parse(read_text_file(dir_ / "g" / "dataset.json")).at("n_clips"), 12);

  write_text_file(dir_ / "bad.json", R"({"no_such_flag": 1})");
  EXPECT_EQ(run({"gen", "--config", path("bad.json"), "--out", path("h")}).code, hcmc::cli::kExitUsage);
}

TEST_F(CliTest, OracleAndReport) {
  const auto r = run({"oracle", "--seeds", "5", "--manifest", path("o.json")});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("0 failures"), std::string::npos);
  EXPECT_TRUE(hcmc::cli::run_oracle_checks(1, 3).failures.empty());

  ASSERT_EQ(gen("i").code, 0);
  ASSERT_EQ(run({"eval", "--data", path("i"), "--pred", "random", "--out", path("r.csv")}).code, 0);
  const auto rep = run({"report", "--inputs", path("r.csv"), "--out", path("summary.csv")});
  ASSERT_EQ(rep.code, 0) << rep.err;
  const auto summary = read_text_file(dir_ / "summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "run,split,beta,n_clips,score,scene_iou,shot_iou");
  EXPECT_NE(summary.find("test_out"), std::string::npos);
}
