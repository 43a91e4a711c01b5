// molhallu: command-line front end for the hallucination metric toolkit.
//
//   molhallu score   --corpus c.jsonl --lexicon lex.tsv --out-dir reports/
//   molhallu attack  --corpus c.jsonl --kind drug-mask --seed 1 --lexicon lex.tsv --out a.jsonl
//   molhallu prefs   --corpus c.jsonl --lexicon lex.tsv --seed 1 --out prefs/
//   molhallu sft     --corpus c.jsonl --lexicon lex.tsv --out sft/
//   molhallu lexicon --in lex.tsv --stats
//   molhallu diff    --before a/comparison.json --after b/comparison.json
//
// Exit codes: 0 success, 1 validation failure, 2 I/O failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "molhallu/attacks.hpp"
#include "molhallu/baselines.hpp"
#include "molhallu/corpus.hpp"
#include "molhallu/errors.hpp"
#include "molhallu/lexicon.hpp"
#include "molhallu/mol_hallu.hpp"
#include "molhallu/prefdata.hpp"
#include "molhallu/reports.hpp"
#include "molhallu/textproc.hpp"

namespace fs = std::filesystem;
using namespace molhallu;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct LexiconOptions {
  std::string path;
  std::string format;  // empty: infer from extension

  EntityLexicon load() const {
    if (path.empty()) {
      throw ValidationError("no lexicon given (use --lexicon or set MOLHALLU_LEXICON)");
    }
    LexiconFormat fmt = infer_lexicon_format(path);
    if (!format.empty()) {
      auto parsed = parse_lexicon_format(format);
      if (!parsed) throw ValidationError("unknown lexicon format '" + format + "'");
      fmt = *parsed;
    }
    EntityLexicon lexicon = load_lexicon(path, fmt);
    for (const auto& warning : lexicon.load_report().warnings) {
      std::cerr << "lexicon: " << warning << '\n';
    }
    return lexicon;
  }
};

void add_lexicon_options(CLI::App* cmd, LexiconOptions& opts) {
  cmd->add_option("--lexicon", opts.path, "Entity lexicon (TSV or JSONL)")->envname("MOLHALLU_LEXICON");
  cmd->add_option("--lexicon-format", opts.format, "tsv or jsonl (default: by extension)");
}

TypeSet parse_types(const std::vector<std::string>& names) {
  if (names.empty()) return all_types();
  TypeSet set;
  for (const auto& name : names) {
    auto type = parse_entity_type(name);
    if (!type) throw ValidationError("unknown entity type '" + name + "'");
    set.set(static_cast<std::size_t>(*type));
  }
  return set;
}

std::string pretty(const nlohmann::ordered_json& j) {
  return j.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace) + "\n";
}

std::string jsonl(const std::vector<nlohmann::ordered_json>& rows) {
  std::ostringstream out;
  write_jsonl(out, rows);
  return out.str();
}

// score

struct ScoreOptions {
  std::string corpus;
  LexiconOptions lexicon;
  std::string out_dir;
  double theta = kDefaultTheta;
  std::string gamma_orientation = "as-printed";
  double meteor_gamma = 0.5;
  std::string chart = "svg";
};

int run_score(const ScoreOptions& opts) {
  ScoringConfig config;
  config.theta = opts.theta;
  auto orientation = parse_gamma_orientation(opts.gamma_orientation);
  if (!orientation) throw ValidationError("unknown gamma orientation '" + opts.gamma_orientation + "'");
  config.orientation = *orientation;
  config.validate();
  if (!(opts.meteor_gamma >= 0.0 && opts.meteor_gamma <= 1.0)) {
    throw ValidationError("--meteor-gamma must be in [0, 1]");
  }
  if (opts.chart != "svg" && opts.chart != "text") throw ValidationError("--chart must be svg or text");

  const EntityLexicon lexicon = opts.lexicon.load();
  const auto records = read_corpus(opts.corpus);

  std::vector<ScoringSample> samples;
  std::vector<std::string> skipped;
  for (const auto& record : records) {
    if (!record.answer_pred) {
      skipped.push_back(record.id);
      std::cerr << "score: skipping '" << record.id << "' (no answer_pred)\n";
      continue;
    }
    samples.push_back(record.to_sample());
  }
  if (samples.empty()) throw ValidationError("no record has an answer_pred; nothing to score");

  const CorpusScore corpus = score_corpus(samples, lexicon, config);
  MeteorParams meteor_params;
  meteor_params.gamma = opts.meteor_gamma;

  std::vector<SampleBaselines> baselines;
  std::vector<nlohmann::ordered_json> per_sample;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto pred = tokenize(samples[i].answer_pred);
    const auto gt = tokenize(samples[i].answer_gt);
    baselines.push_back({samples[i].id, baseline_scores(pred.tokens, gt.tokens, meteor_params)});
    nlohmann::ordered_json row;
    row["id"] = samples[i].id;
    row["mol_hallu"] = corpus.sample_scores[i].to_json();
    row["baselines"] = baselines.back().scores.to_json();
    per_sample.push_back(std::move(row));
  }

  const ComparisonTable table = comparison_table(corpus, baselines);
  const HistogramSummary histogram = histogram_nc(corpus);

  nlohmann::ordered_json summary;
  summary["samples"] = samples.size();
  summary["skipped"] = skipped;
  summary["mol_hallu"] = corpus.mean_f1;
  summary["theta"] = config.theta;
  summary["gamma_orientation"] = std::string(to_string(config.orientation));
  summary["meteor_gamma"] = meteor_params.gamma;
  summary["mean_display"] = to_json(table)["mean"];

  const fs::path out = opts.out_dir;
  write_text_file(out / "scores.jsonl", jsonl(per_sample));
  write_text_file(out / "summary.json", pretty(summary));
  write_text_file(out / "comparison.csv", to_csv(table));
  write_text_file(out / "comparison.json", pretty(to_json(table)));
  write_text_file(out / "histogram.json", pretty(histogram.to_json()));
  if (opts.chart == "svg") {
    write_text_file(out / "histogram.svg", render_histogram_svg(histogram));
  } else {
    write_text_file(out / "histogram.txt", render_histogram_text(histogram));
  }

  std::cout << "scored " << samples.size() << " samples";
  if (!skipped.empty()) std::cout << " (" << skipped.size() << " skipped)";
  std::cout << "; Mol-Hallu = " << corpus.mean_f1 << "\n";
  return 0;
}

// attack

struct AttackOptions {
  std::string corpus;
  std::string kind;
  std::uint64_t seed = 0;
  LexiconOptions lexicon;
  std::string out;
  std::string manifest;
  std::vector<std::string> types;
};

int run_attack(const AttackOptions& opts) {
  auto kind = parse_attack_kind(opts.kind);
  if (!kind) throw ValidationError("unknown attack kind '" + opts.kind + "'");
  const TypeSet types = parse_types(opts.types);
  const EntityLexicon lexicon = opts.lexicon.load();
  const auto records = read_corpus(opts.corpus);

  const AttackOutput output = attack_corpus(records, *kind, opts.seed, lexicon, types);
  std::ostringstream corpus_out;
  write_corpus(corpus_out, output.records);
  write_text_file(opts.out, corpus_out.str());
  const std::string manifest_path = opts.manifest.empty() ? opts.out + ".manifest.json" : opts.manifest;
  write_text_file(manifest_path, pretty(output.manifest));
  std::cout << "wrote " << output.records.size() << " records to " << opts.out << "\n";
  return 0;
}

// prefs / sft

struct PrefsOptions {
  std::string corpus;
  LexiconOptions lexicon;
  std::size_t n = 2000;
  std::size_t negatives = 1;
  std::size_t k = 0;  // 0: random per negative
  std::uint64_t seed = 0;
  std::string external;
  std::string out;
  bool allow_smaller = false;
  double theta = kDefaultTheta;
};

int run_prefs(const PrefsOptions& opts) {
  const EntityLexicon lexicon = opts.lexicon.load();
  const auto records = read_corpus(opts.corpus);

  PreferenceConfig config;
  config.sample_count = opts.n;
  config.negatives_per_sample = opts.negatives;
  if (opts.k > 0) config.k = opts.k;
  config.seed = opts.seed;
  config.allow_smaller = opts.allow_smaller;
  config.scoring.theta = opts.theta;

  ExternalNegatives external;
  if (!opts.external.empty()) external = read_external_negatives(opts.external);

  const PreferenceDataset dataset = build_preference_dataset(
      records, lexicon, config, opts.external.empty() ? nullptr : &external);

  std::vector<nlohmann::ordered_json> rows;
  for (const auto& triple : dataset.triples) rows.push_back(triple.to_json());
  nlohmann::ordered_json report = dataset.report.to_json();
  report["seed"] = opts.seed;

  const fs::path out = opts.out;
  write_text_file(out / "preferences.jsonl", jsonl(rows));
  write_text_file(out / "preferences_report.json", pretty(report));
  write_text_file(out / "README.md", dataset_readme());
  std::cout << "wrote " << dataset.triples.size() << " preference triples to "
            << (out / "preferences.jsonl").string() << "\n";
  return 0;
}

int run_sft(const std::string& corpus, const LexiconOptions& lexicon_opts, const std::string& out_dir) {
  const EntityLexicon lexicon = lexicon_opts.load();
  const auto records = read_corpus(corpus);
  std::vector<nlohmann::ordered_json> rows;
  for (const auto& pair : build_sft_dataset(records, lexicon)) rows.push_back(pair.to_json());
  const fs::path out = out_dir;
  write_text_file(out / "sft.jsonl", jsonl(rows));
  write_text_file(out / "README.md", dataset_readme());
  std::cout << "wrote " << rows.size() << " SFT pairs to " << (out / "sft.jsonl").string() << "\n";
  return 0;
}

// lexicon

int run_lexicon(const LexiconOptions& opts, bool stats) {
  const EntityLexicon lexicon = opts.load();
  nlohmann::ordered_json j;
  j["load_report"] = lexicon.load_report().to_json();
  if (stats) j["stats"] = lexicon_stats(lexicon).to_json();
  std::cout << pretty(j);
  return 0;
}

// diff

ComparisonTable read_comparison(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return comparison_from_json(j);
}

int run_diff(const std::string& before, const std::string& after, const std::string& out) {
  const auto report = diff_report(read_comparison(before), read_comparison(after));
  if (out.empty()) {
    std::cout << pretty(report);
  } else {
    write_text_file(out, pretty(report));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mol-Hallu hallucination metric toolkit"};
  app.require_subcommand(1);

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score predictions with Mol-Hallu and baseline metrics");
  score_cmd->add_option("--corpus", score.corpus, "Corpus JSONL with answer_pred")->required();
  add_lexicon_options(score_cmd, score.lexicon);
  score_cmd->add_option("--out-dir", score.out_dir, "Report directory")->required();
  score_cmd->add_option("--theta", score.theta, "Smoothing floor for per-order components")
      ->capture_default_str();
  score_cmd->add_option("--gamma-orientation", score.gamma_orientation, "as-printed or inverted")
      ->capture_default_str();
  score_cmd->add_option("--meteor-gamma", score.meteor_gamma, "METEOR fragmentation weight")
      ->capture_default_str();
  score_cmd->add_option("--chart", score.chart, "Histogram chart: svg or text")->capture_default_str();

  AttackOptions attack;
  auto* attack_cmd = app.add_subcommand("attack", "Apply a knowledge-shortcut attack to a corpus");
  attack_cmd->add_option("--corpus", attack.corpus, "Input corpus JSONL")->required();
  attack_cmd->add_option("--kind", attack.kind, "drug-mask, drug-distract or molecule-mask")->required();
  attack_cmd->add_option("--seed", attack.seed, "Random seed")->required();
  add_lexicon_options(attack_cmd, attack.lexicon);
  attack_cmd->add_option("--out", attack.out, "Output corpus JSONL")->required();
  attack_cmd->add_option("--manifest", attack.manifest, "Manifest path (default: <out>.manifest.json)");
  attack_cmd->add_option("--types", attack.types, "Entity types to target (default: all)")->delimiter(',');

  PrefsOptions prefs;
  auto* prefs_cmd = app.add_subcommand("prefs", "Build the hallucination-sensitive preference dataset");
  prefs_cmd->add_option("--corpus", prefs.corpus, "Training corpus JSONL")->required();
  add_lexicon_options(prefs_cmd, prefs.lexicon);
  prefs_cmd->add_option("--n", prefs.n, "Number of QA pairs to sample")->capture_default_str();
  prefs_cmd->add_option("--negatives", prefs.negatives, "Entity-perturbed negatives per pair")
      ->capture_default_str();
  prefs_cmd->add_option("--k", prefs.k, "Entities replaced per negative (0: random)")->capture_default_str();
  prefs_cmd->add_option("--seed", prefs.seed, "Random seed")->required();
  prefs_cmd->add_option("--external", prefs.external, "Model-sampled negatives JSONL {id, texts}");
  prefs_cmd->add_option("--out", prefs.out, "Output directory")->required();
  prefs_cmd->add_flag("--allow-smaller", prefs.allow_smaller, "Accept a corpus smaller than --n");
  prefs_cmd->add_option("--theta", prefs.theta, "Smoothing floor used when re-scoring negatives")
      ->capture_default_str();

  std::string sft_corpus, sft_out;
  LexiconOptions sft_lexicon;
  auto* sft_cmd = app.add_subcommand("sft", "Build the entity-masked SFT corpus");
  sft_cmd->add_option("--corpus", sft_corpus, "Training corpus JSONL")->required();
  add_lexicon_options(sft_cmd, sft_lexicon);
  sft_cmd->add_option("--out", sft_out, "Output directory")->required();

  LexiconOptions lexicon_in;
  bool lexicon_stats_flag = false;
  auto* lexicon_cmd = app.add_subcommand("lexicon", "Validate a lexicon and print its load report");
  lexicon_cmd->add_option("--in", lexicon_in.path, "Lexicon file")->required();
  lexicon_cmd->add_option("--format", lexicon_in.format, "tsv or jsonl (default: by extension)");
  lexicon_cmd->add_flag("--stats", lexicon_stats_flag, "Include per-type percentages");

  std::string diff_before, diff_after, diff_out;
  auto* diff_cmd = app.add_subcommand("diff", "Compare two comparison.json reports");
  diff_cmd->add_option("--before", diff_before, "Baseline comparison.json")->required();
  diff_cmd->add_option("--after", diff_after, "Updated comparison.json")->required();
  diff_cmd->add_option("--out", diff_out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*score_cmd) return run_score(score);
    if (*attack_cmd) return run_attack(attack);
    if (*prefs_cmd) return run_prefs(prefs);
    if (*sft_cmd) return run_sft(sft_corpus, sft_lexicon, sft_out);
    if (*lexicon_cmd) return run_lexicon(lexicon_in, lexicon_stats_flag);
    if (*diff_cmd) return run_diff(diff_before, diff_after, diff_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}
