#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "adherence/cli/commands.hpp"
#include "adherence/cli/config.hpp"
#include "adherence/cli/manifest.hpp"
#include "adherence/csv.hpp"
#include "fixtures.hpp"

using namespace adherence;
using namespace adherence::cli;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const char* kSmallModels = R"(
# kept small so the suite stays quick
synth.n_units = 150
synth.n_occasions = 20
model.extra_trees.n_trees = 10
model.random_forest.n_trees = 10
model.regularized_boosting.n_stages = 20
model.gradient_boosting.n_stages = 20
model.mlp.hidden = 8
model.mlp.epochs = 5
tune.folds = 3
)";

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("adherence_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    apply_text(config, kSmallModels);
    config.out = dir;
    config.seed = 11;
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path dir;
  RunConfig config;
};

}  // namespace

TEST(Config, GrammarAndDefaults) {
  RunConfig c;
  apply_text(c, "  # comment\n\nk = 8   # trailing\nsplit_ratio=0.75\nundersample = yes\n"
                "search.random_forest.max_depth = 4, 8\nsynth.frequency_mix = weekly:0.5, daily:0.5\n");
  EXPECT_EQ(c.k, 8u);
  EXPECT_EQ(c.split_ratio, 0.75);
  EXPECT_TRUE(c.undersample);
  ASSERT_EQ(c.search[ModelKind::RandomForest].params.size(), 1u);
  EXPECT_EQ(c.search[ModelKind::RandomForest].params[0].second,
            (std::vector<std::string>{"4", "8"}));
  EXPECT_EQ(c.synth.frequency_mix.size(), 2u);
  EXPECT_EQ(c.drops_path(), fs::path("run") / "drops.csv");
  EXPECT_EQ(c.model_path(), fs::path("run") / "ensemble.json");
  validate(c);
}

TEST(Config, BadSettings) {
  RunConfig c;
  EXPECT_EQ(code_of([&] { apply_setting(c, "colour", "red"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([&] { apply_setting(c, "k", "six"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([&] { apply_setting(c, "undersample", "maybe"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([&] { apply_setting(c, "model.svm.c", "1"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([&] { apply_setting(c, "model.mlp.epochs", "two"); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([&] { apply_setting(c, "search.mlp.epochs", ""); }), ErrorCode::ConfigInvalid);
  EXPECT_EQ(code_of([&] { apply_text(c, "k 6\n"); }), ErrorCode::ConfigInvalid);
  try {
    apply_text(c, "k = 6\nseed = x\n", "run.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("run.cfg:2"), std::string::npos) << e.what();
  }
  RunConfig m;
  apply_setting(m, "model.mlp.epochs", "-3");
  EXPECT_EQ(code_of([&] { validate(m); }), ErrorCode::ConfigInvalid);
  RunConfig r;
  r.split_ratio = 1.0;
  EXPECT_EQ(code_of([&] { validate(r); }), ErrorCode::ConfigInvalid);
  RunConfig s;
  s.sweep_k_min = 9;
  s.sweep_k_max = 5;
  EXPECT_EQ(code_of([&] { validate(s); }), ErrorCode::ConfigInvalid);
}

TEST(Errors, ExitCodesAndJsonLine) {
  EXPECT_EQ(exit_code(Error(ErrorCode::ConfigInvalid, "x")), 2);
  EXPECT_EQ(exit_code(Error(ErrorCode::MissingColumn, "x")), 3);
  EXPECT_EQ(exit_code(Error(ErrorCode::ModelFormat, "x")), 4);
  const std::string line = error_line(Error(ErrorCode::ForeignKeyViolation, "unit \"U9\" unknown"));
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["error"], "ForeignKeyViolation");
  EXPECT_EQ(j["category"], "data");
  EXPECT_EQ(j["message"], "unit \"U9\" unknown");
}

TEST(Manifest, HashesEveryFile) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const fs::path dir = fs::temp_directory_path() / "adherence_manifest_test";
  fs::remove_all(dir);
  fs::create_directories(dir / "sub");
  spit(dir / "b.txt", "abc");
  spit(dir / "sub" / "a.txt", "");
  write_manifest(dir);
  const fs::path m = write_manifest(dir);
  EXPECT_EQ(slurp(m),
            "path,sha256,bytes\n"
            "b.txt,ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad,3\n"
            "sub/a.txt,e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855,0\n");
  fs::remove_all(dir);
}

TEST_F(CliRun, EndToEnd) {
  run_command(Command::Synth, config);
  for (const char* f : {"units.csv", "schedule.csv", "drops.csv", "truth.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  run_command(Command::Label, config);
  EXPECT_TRUE(fs::exists(dir / "labeled_occasions.csv"));
  run_command(Command::Features, config);
  const CsvTable ranking = read_csv(dir / "ranking.csv");
  ASSERT_FALSE(ranking.rows.empty());
  run_command(Command::Train, config);
  run_command(Command::Predict, config);
  const CsvTable preds = read_csv(dir / "predictions.csv");
  const CsvTable testing = read_csv(dir / "testing.csv");
  EXPECT_GT(preds.rows.size(), 150u);
  EXPECT_EQ(preds.rows.size(), testing.rows.size());
  run_command(Command::Evaluate, config);
  const auto metrics = nlohmann::json::parse(slurp(dir / "metrics.json"));
  EXPECT_GT(metrics["roc_auc"].get<double>(), 0.75);
  EXPECT_GT(metrics["accuracy"].get<double>(), 0.7);
  EXPECT_TRUE(fs::exists(dir / "manifest.csv"));
}

TEST_F(CliRun, ShortHistoryIsSkipped) {
  run_command(Command::Synth, config);
  run_command(Command::Train, config);

  // The six-unit fleet has eight weekly occasions; on Feb 9 only five precede it.
  const auto six = fixture::six_units();
  RunConfig p = config;
  p.out = dir / "six";
  fs::create_directories(p.out);
  spit(p.out / "drops.csv", six.drops);
  spit(p.out / "schedule.csv", six.schedule);
  spit(p.out / "units.csv", six.units);
  p.model_file = dir / "ensemble.json";
  p.as_of = six.as_of;
  apply_setting(p, "predict_day", "2019-02-09");
  run_command(Command::Predict, p);
  EXPECT_EQ(read_csv(p.out / "predictions.csv").rows.size(), 0u);
  const CsvTable skipped = read_csv(p.out / "skipped.csv");
  ASSERT_FALSE(skipped.rows.empty());
  bool u5 = false;
  for (const auto& row : skipped.rows) {
    if (row.fields[0] == "U5") {
      u5 = true;
      EXPECT_EQ(row.fields[2], "InsufficientHistory");
    }
  }
  EXPECT_TRUE(u5);

  apply_setting(p, "predict_day", "2019-02-23");
  run_command(Command::Predict, p);
  const CsvTable later = read_csv(p.out / "predictions.csv");
  bool predicted_u5 = false;
  for (const auto& row : later.rows) predicted_u5 |= row.fields[0] == "U5";
  EXPECT_TRUE(predicted_u5);
}

TEST_F(CliRun, EntryPointReportsErrors) {
  const std::string out = dir.string();
  std::vector<std::string> args{"adherence", "--out", out, "--set", "colour=red", "label"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  EXPECT_EQ(run_cli(static_cast<int>(argv.size()), argv.data()), 2);

  std::vector<std::string> missing{"adherence", "--out", out, "label"};
  argv.clear();
  for (auto& a : missing) argv.push_back(a.data());
  EXPECT_EQ(run_cli(static_cast<int>(argv.size()), argv.data()), 3);

  std::vector<std::string> synth{"adherence", "--out", out, "--seed", "3", "--set",
                                 "synth.n_units=20", "synth"};
  argv.clear();
  for (auto& a : synth) argv.push_back(a.data());
  EXPECT_EQ(run_cli(static_cast<int>(argv.size()), argv.data()), 0);
  EXPECT_TRUE(fs::exists(dir / "drops.csv"));
}
