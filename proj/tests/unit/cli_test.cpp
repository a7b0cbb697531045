//
// CliffKit - Copyright 2026 CliffKit contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

#include <gtest/gtest.h>

#include "cliffkit/checkpoint.h"
#include "cliffkit/io.h"

namespace cliffkit {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(fs::temp_directory_path() / "cliffkit_cli_test");
    fs::remove_all(*dir_);
    fs::create_directories(*dir_);
    ASSERT_EQ(run("synth --scaffolds 1 --decorations 8 --seed 2 --out c.csv"), 0);
    ASSERT_EQ(run("pairs --compounds c.csv --min-delta 0.3 --min-pairs 1 --out p.jsonl"), 0);
    ASSERT_EQ(run("train --pairs p.jsonl --variant n-gl --epochs 3 --patience 2 --hidden 4 "
                  "--out a.ckpt"),
              0);
    ASSERT_EQ(run("train --pairs p.jsonl --epochs 3 --patience 2 --hidden 4 --seed 1 "
                  "--out b.ckpt"),
              0);
    ASSERT_EQ(run("eval --pairs p.jsonl --checkpoint b.ckpt a.ckpt --labels n n-gl "
                  "--ig-steps 4 --out e.json"),
              0);
    ASSERT_EQ(run("attribute --pairs p.jsonl --checkpoint a.ckpt --ig-steps 4 --out a.jsonl"),
              0);
    const std::vector<CliffPair> pairs = read_pairs_jsonl(*dir_ / "p.jsonl");
    ASSERT_FALSE(pairs.empty());
    pair_id_ = new std::string(pairs.front().pair_id);
    ASSERT_EQ(run("render --pairs p.jsonl --attributions a.jsonl --pair-id " + *pair_id_ +
                  " --out-dir svg"),
              0);
  }

  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
    delete pair_id_;
  }

  static int run(const std::string &args) {
    const std::string cmd = "cd '" + dir_->string() + "' && '" CLIFFKIT_CLI_PATH "' " + args +
                            " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::map<std::string, std::string> snapshot() {
    std::map<std::string, std::string> files;
    for (const auto &e : fs::recursive_directory_iterator(*dir_))
      if (e.is_regular_file())
        files[fs::relative(e.path(), *dir_).string()] = read_file(e.path());
    return files;
  }

  static fs::path *dir_;
  static std::string *pair_id_;
};

fs::path *CliTest::dir_ = nullptr;
std::string *CliTest::pair_id_ = nullptr;

TEST_F(CliTest, EverySubcommandWritesAManifest) {
  for (const char *m : {"c.csv", "p.jsonl", "a.ckpt", "e.json", "a.jsonl"}) {
    const fs::path manifest = *dir_ / (std::string(m) + ".manifest.json");
    ASSERT_TRUE(fs::exists(manifest)) << m;
    const nlohmann::json j = nlohmann::json::parse(read_file(manifest));
    EXPECT_EQ(j.at("schema"), "cliffkit-manifest/1");
  }
  EXPECT_TRUE(fs::exists(*dir_ / "svg" / (*pair_id_ + ".manifest.json")));
}

TEST_F(CliTest, ReplayIsByteIdentical) {
  const auto before = snapshot();
  for (const std::string m :
       {"c.csv", "p.jsonl", "a.ckpt", "b.ckpt", "e.json", "a.jsonl"})
    EXPECT_EQ(run("replay " + m + ".manifest.json"), 0) << m;
  EXPECT_EQ(run("replay svg/" + *pair_id_ + ".manifest.json"), 0);
  const auto after = snapshot();
  ASSERT_EQ(before.size(), after.size());
  for (const auto &[name, bytes] : before)
    EXPECT_TRUE(after.at(name) == bytes) << name;
}

TEST_F(CliTest, ReplayRejectsChangedInputs) {
  const fs::path copy = *dir_ / "p2.jsonl";
  fs::copy_file(*dir_ / "p.jsonl", copy, fs::copy_options::overwrite_existing);
  ASSERT_EQ(run("train --pairs p2.jsonl --epochs 2 --patience 1 --hidden 4 --out t.ckpt"), 0);
  write_file(copy, read_file(copy) + "\n");
  EXPECT_EQ(run("replay t.ckpt.manifest.json"), 4);
  EXPECT_EQ(run("replay missing.manifest.json"), 2);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("train --pairs nowhere.jsonl --out x.ckpt"), 2);
  EXPECT_EQ(run("train --pairs p.jsonl --variant lasso --out x.ckpt"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  write_file(*dir_ / "junk.ckpt", "not a checkpoint");
  EXPECT_EQ(run("eval --pairs p.jsonl --checkpoint junk.ckpt --out x.json"), 4);
  write_file(*dir_ / "bad.csv", "compound_id,target_id,smiles,ic50_nm\na,T,C1CC,5\n");
  EXPECT_EQ(run("pairs --compounds bad.csv --strict --out x.jsonl"), 2);
  // Failed runs leave no manifest behind.
  EXPECT_FALSE(fs::exists(*dir_ / "x.jsonl.manifest.json"));
  EXPECT_FALSE(fs::exists(*dir_ / "x.json.manifest.json"));
  EXPECT_NE(run("render --pairs p.jsonl --attributions a.jsonl --pair-id nope --out-dir bad"), 0);
  EXPECT_FALSE(fs::exists(*dir_ / "bad" / "nope.manifest.json"));
}

TEST_F(CliTest, ReportsCarryTheManifestHash) {
  const std::string manifest_hash = file_sha256(*dir_ / "e.json.manifest.json");
  const nlohmann::json report = nlohmann::json::parse(read_file(*dir_ / "e.json"));
  EXPECT_EQ(report.at("manifest_sha256"), manifest_hash);
  ASSERT_EQ(report.at("models").size(), 2);
  EXPECT_EQ(report["models"][0].at("checkpoint_sha256"), file_sha256(*dir_ / "b.ckpt"));
  const Checkpoint ck = load_checkpoint(*dir_ / "a.ckpt");
  EXPECT_EQ(ck.metadata.at("manifest_sha256"), file_sha256(*dir_ / "a.ckpt.manifest.json"));
  EXPECT_EQ(ck.metadata.at("pairs_sha256"), file_sha256(*dir_ / "p.jsonl"));
}

} // namespace
} // namespace cliffkit
