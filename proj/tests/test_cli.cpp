#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

// Runs the installed binary, returning its exit code with output captured to
// `log` (so failures can be inspected without polluting the test output).
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(AFFECT_CLI_PATH) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

struct CliSandbox {
  fs::path dir;
  fs::path log;

  CliSandbox() {
    dir = fs::temp_directory_path() / "affect_cli_sandbox";
    fs::remove_all(dir);
    fs::create_directories(dir);
    log = dir / "cli.log";
  }
  ~CliSandbox() { fs::remove_all(dir); }

  void write(const std::string& name, const std::string& body) const {
    std::ofstream f(dir / name);
    f << body;
  }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage and error exit codes") {
  CliSandbox box;
  CHECK(run_cli("--help", box.log) == 0);
  CHECK(run_cli("train --help", box.log) == 0);
  // Unknown subcommand and missing required argument are usage errors.
  CHECK(run_cli("frobnicate", box.log) == 1);
  CHECK(run_cli("train", box.log) == 1);
  // A missing config file is a runtime error, not a usage error.
  CHECK(run_cli("train /nonexistent/job.cfg", box.log) == 2);
  const std::string log = slurp(box.log);
  CHECK(log.find("error:") != std::string::npos);

  // Unknown config keys fail loudly.
  box.write("bad.cfg", "out_dir = run\nmodel = sentiment\nbanana = 1\n");
  CHECK(run_cli("train " + (box.dir / "bad.cfg").string(), box.log) == 2);
  CHECK(slurp(box.log).find("banana") != std::string::npos);
}

TEST_CASE("sentiment train, eval and predict round trip") {
  CliSandbox box;
  box.write("emb.txt",
            "wonderful 0.9 0.1 0.0 0.2\n"
            "dreadful -0.8 0.0 0.1 -0.3\n"
            "the 0.0 0.1 0.0 0.0\n"
            "movie 0.1 0.0 0.2 0.1\n"
            "was 0.0 0.0 0.1 0.0\n");
  std::string rows;
  for (int i = 0; i < 10; ++i) {
    rows += "1\tthe movie was wonderful\n";
    rows += "0\tthe movie was dreadful\n";
  }
  box.write("train.tsv", rows);
  box.write("train.cfg",
            "out_dir = run\n"
            "model = sentiment\n"
            "train_file = train.tsv\n"
            "embeddings_file = emb.txt\n"
            "heights = 2,3\n"
            "maps = 3\n"
            "learning_rate = 0.2\n"
            "momentum = 0.5\n"
            "max_epochs = 4\n"
            "patience = 4\n"
            "batch_size = 4\n"
            "seed = 7\n");

  REQUIRE(run_cli("train " + (box.dir / "train.cfg").string(), box.log) == 0);
  const std::string train_log = slurp(box.log);
  CHECK(train_log.find("resolved configuration:") != std::string::npos);
  CHECK(train_log.find("checkpoint written") != std::string::npos);
  CHECK(fs::exists(box.dir / "run/model.ckpt"));
  CHECK(fs::exists(box.dir / "run/epochs.csv"));
  CHECK(fs::exists(box.dir / "run/metrics.txt"));
  CHECK(fs::exists(box.dir / "run/resolved_config.txt"));
  const std::string epochs = slurp(box.dir / "run/epochs.csv");
  CHECK(epochs.rfind("epoch,train_loss,dev_error,elapsed_ms\n", 0) == 0);

  box.write("eval.cfg",
            "out_dir = eval_run\n"
            "checkpoint = run/model.ckpt\n"
            "eval_file = train.tsv\n");
  REQUIRE(run_cli("eval " + (box.dir / "eval.cfg").string(), box.log) == 0);
  const std::string eval_log = slurp(box.log);
  CHECK(eval_log.find("F1") != std::string::npos);
  CHECK(fs::exists(box.dir / "eval_run/metrics.txt"));

  box.write("texts.txt",
            "the movie was wonderful\n"
            "the movie was dreadful\n");
  box.write("predict.cfg",
            "out_dir = pred_run\n"
            "checkpoint = run/model.ckpt\n"
            "texts_file = texts.txt\n");
  REQUIRE(run_cli("predict " + (box.dir / "predict.cfg").string(), box.log) ==
          0);
  const std::string csv = slurp(box.dir / "pred_run/predictions.csv");
  CHECK(csv.rfind("utterance_id,probability_positive\n", 0) == 0);
  // Two data rows, 1-based ids.
  CHECK(csv.find("\n1,") != std::string::npos);
  CHECK(csv.find("\n2,") != std::string::npos);

  // Evaluating a sentiment checkpoint without its input is a config error.
  box.write("eval_bad.cfg",
            "out_dir = eval_bad\n"
            "checkpoint = run/model.ckpt\n"
            "segments_file = train.tsv\n");
  CHECK(run_cli("eval " + (box.dir / "eval_bad.cfg").string(), box.log) == 2);
}

TEST_CASE("persona report") {
  CliSandbox box;
  const fs::path lexdir = box.dir / "lexicons";
  fs::create_directories(lexdir);
  const std::vector<std::string> families = {
      "hedges",           "negations",        "articles",
      "self_references",  "social_words",     "positive_emotion",
      "negative_emotion", "exclusive_inclusive"};
  for (const std::string& fam : families) {
    std::ofstream f(lexdir / (fam + ".txt"));
    f << "zzz_" << fam << "\n";
  }
  {
    std::ofstream f(lexdir / "social_words.txt");
    f << "we\nparty\ntogether\n";
  }
  box.write("responses.txt",
            "Can you repeat?\n"
            "We had a party together.\n"
            "get lost now\n");
  box.write("persona.cfg",
            "out_dir = persona_run\n"
            "responses_file = responses.txt\n"
            "lexicons_dir = lexicons\n");
  REQUIRE(run_cli("persona " + (box.dir / "persona.cfg").string(), box.log) ==
          0);
  const std::string report = slurp(box.dir / "persona_run/report.txt");
  CHECK(report.find("challenge=clarification") != std::string::npos);
  CHECK(report.find("challenge=abusive") != std::string::npos);
  CHECK(report.find("challenge=none") != std::string::npos);
  CHECK(report.find("personality: ") != std::string::npos);
  CHECK(report.find("challenges: 2") != std::string::npos);
}

}  // TEST_SUITE
