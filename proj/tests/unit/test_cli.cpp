#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kCli = MOLHALLU_CLI_PATH;

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI with output captured to <dir>/stdout and <dir>/stderr.
int run(const std::string& args, const fs::path& dir) {
  const std::string cmd = "env -u MOLHALLU_LEXICON " + quote(kCli.string()) + " " + args + " >" +
                          quote((dir / "stdout").string()) + " 2>" + quote((dir / "stderr").string());
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string demo(const char* name) { return quote((support::data_dir() / name).string()); }

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

}  // namespace

TEST_CASE("score: demo corpus is deterministic") {
  auto dir = support::temp_dir("cli_score");
  const std::string base = "score --corpus " + demo("demo_corpus.jsonl") + " --lexicon " + demo("demo_lexicon.tsv");
  REQUIRE(run(base + " --out-dir " + quote((dir / "a").string()), dir) == 0);
  REQUIRE(run(base + " --out-dir " + quote((dir / "b").string()), dir) == 0);
  for (const char* f : {"scores.jsonl", "summary.json", "comparison.csv", "comparison.json", "histogram.json",
                        "histogram.svg"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(dir / "a" / f));
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
  auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(summary.contains("mol_hallu"));

  REQUIRE(run(base + " --chart text --out-dir " + quote((dir / "c").string()), dir) == 0);
  CHECK(fs::exists(dir / "c" / "histogram.txt"));
}

TEST_CASE("score: lexicon from the environment") {
  auto dir = support::temp_dir("cli_env");
  const std::string cmd = "MOLHALLU_LEXICON=" + demo("demo_lexicon.tsv") + " " + quote(kCli.string()) +
                          " score --corpus " + demo("demo_corpus.jsonl") + " --out-dir " +
                          quote((dir / "o").string()) + " >/dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
}

TEST_CASE("score: validation and I/O exit codes") {
  auto dir = support::temp_dir("cli_errors");
  const std::string base = "score --corpus " + demo("demo_corpus.jsonl") + " --lexicon " + demo("demo_lexicon.tsv") +
                           " --out-dir " + quote((dir / "o").string());
  CHECK(run(base + " --theta 0", dir) == 1);
  CHECK(run(base + " --gamma-orientation sideways", dir) == 1);
  CHECK(run("score --corpus /nonexistent.jsonl --lexicon " + demo("demo_lexicon.tsv") + " --out-dir " +
                quote((dir / "o").string()),
            dir) == 2);
  CHECK(run("score --corpus " + demo("demo_corpus.jsonl") + " --lexicon /nonexistent.tsv --out-dir " +
                quote((dir / "o").string()),
            dir) == 2);
  CHECK(run("frobnicate", dir) == 1);
  CHECK(run("--help", dir) == 0);

  write(dir / "nopred.jsonl", R"({"id": "x", "smiles": "", "question": "q", "answer_gt": "ketone"})" "\n");
  CHECK(run("score --corpus " + quote((dir / "nopred.jsonl").string()) + " --lexicon " + demo("demo_lexicon.tsv") +
                " --out-dir " + quote((dir / "o").string()),
            dir) == 1);

  write(dir / "partial.jsonl",
        R"({"id": "x", "smiles": "", "question": "q", "answer_gt": "ketone"})" "\n"
        R"({"id": "y", "smiles": "", "question": "q", "answer_gt": "ketone", "answer_pred": "ketone"})" "\n");
  CHECK(run("score --corpus " + quote((dir / "partial.jsonl").string()) + " --lexicon " + demo("demo_lexicon.tsv") +
                " --out-dir " + quote((dir / "p").string()),
            dir) == 0);
  CHECK(slurp(dir / "stderr").find("x") != std::string::npos);

  write(dir / "dup.jsonl",
        R"({"id": "x", "smiles": "", "question": "q", "answer_gt": "a", "answer_pred": "a"})" "\n"
        R"({"id": "x", "smiles": "", "question": "q", "answer_gt": "a", "answer_pred": "a"})" "\n");
  CHECK(run("score --corpus " + quote((dir / "dup.jsonl").string()) + " --lexicon " + demo("demo_lexicon.tsv") +
                " --out-dir " + quote((dir / "d").string()),
            dir) == 1);
}

TEST_CASE("attack") {
  auto dir = support::temp_dir("cli_attack");
  const std::string base = "attack --corpus " + demo("demo_corpus.jsonl") + " --lexicon " + demo("demo_lexicon.tsv");
  REQUIRE(run(base + " --kind drug-distract --seed 3 --out " + quote((dir / "a.jsonl").string()), dir) == 0);
  REQUIRE(run(base + " --kind drug-distract --seed 3 --out " + quote((dir / "b.jsonl").string()), dir) == 0);
  CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
  auto manifest = nlohmann::json::parse(slurp(dir / "a.jsonl.manifest.json"));
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["kind"] == "drug-distract");

  REQUIRE(run(base + " --kind molecule-mask --seed 1 --out " + quote((dir / "m.jsonl").string()), dir) == 0);
  std::ifstream in(dir / "m.jsonl");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    CHECK(nlohmann::json::parse(line)["smiles"] == "");
    ++n;
  }
  CHECK(n == 10);

  CHECK(run(base + " --kind shuffle --seed 1 --out " + quote((dir / "x.jsonl").string()), dir) == 1);
  CHECK(run(base + " --kind drug-mask --out " + quote((dir / "x.jsonl").string()), dir) == 1);
  CHECK(run(base + " --kind drug-mask --seed 1 --types Reaction --out " + quote((dir / "x.jsonl").string()), dir) == 1);
}

TEST_CASE("prefs and sft") {
  auto dir = support::temp_dir("cli_prefs");
  const std::string base = "prefs --corpus " + demo("demo_corpus.jsonl") + " --lexicon " + demo("demo_lexicon.tsv") +
                           " --n 5 --seed 11";
  REQUIRE(run(base + " --out " + quote((dir / "a").string()), dir) == 0);
  REQUIRE(run(base + " --out " + quote((dir / "b").string()), dir) == 0);
  CHECK(slurp(dir / "a" / "preferences.jsonl") == slurp(dir / "b" / "preferences.jsonl"));
  CHECK(fs::exists(dir / "a" / "README.md"));
  CHECK(run("prefs --corpus " + demo("demo_corpus.jsonl") + " --lexicon " + demo("demo_lexicon.tsv") +
                " --seed 1 --out " + quote((dir / "c").string()),
            dir) == 1);  // default n exceeds the demo corpus
  CHECK(run("prefs --corpus " + demo("demo_corpus.jsonl") + " --lexicon " + demo("demo_lexicon.tsv") +
                " --allow-smaller --seed 1 --out " + quote((dir / "c").string()),
            dir) == 0);

  REQUIRE(run("sft --corpus " + demo("demo_corpus.jsonl") + " --lexicon " + demo("demo_lexicon.tsv") + " --out " +
                  quote((dir / "s").string()),
              dir) == 0);
  std::ifstream in(dir / "s" / "sft.jsonl");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 10);
}

TEST_CASE("lexicon") {
  auto dir = support::temp_dir("cli_lexicon");
  REQUIRE(run("lexicon --in " + demo("demo_lexicon.tsv") + " --stats", dir) == 0);
  auto report = nlohmann::json::parse(slurp(dir / "stdout"));
  CHECK(report["load_report"]["loaded"].get<int>() > 100);
  CHECK(report.contains("stats"));
  write(dir / "empty.tsv", "surface\ttype\n");
  CHECK(run("lexicon --in " + quote((dir / "empty.tsv").string()), dir) == 1);
  CHECK(run("lexicon --in /nonexistent.tsv", dir) == 2);
}

TEST_CASE("diff") {
  auto dir = support::temp_dir("cli_diff");
  const std::string lex = " --lexicon " + demo("demo_lexicon.tsv");
  REQUIRE(run("score --corpus " + demo("demo_corpus.jsonl") + lex + " --out-dir " + quote((dir / "a").string()),
              dir) == 0);
  REQUIRE(run("diff --before " + quote((dir / "a" / "comparison.json").string()) + " --after " +
                  quote((dir / "a" / "comparison.json").string()) + " --out " + quote((dir / "d.json").string()),
              dir) == 0);
  auto d = nlohmann::json::parse(slurp(dir / "d.json"));
  CHECK(d["metrics"]["mol_hallu"]["delta"].get<double>() == 0.0);
}
