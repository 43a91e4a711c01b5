#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "molhallu/mol_hallu.hpp"

namespace molhallu {

// One line of a corpus JSONL file.
struct CorpusRecord {
  std::string id;
  std::string smiles;
  std::string question;
  std::string answer_gt;
  std::optional<std::string> answer_pred;
  std::optional<std::string> description;

  nlohmann::ordered_json to_json() const;
  static CorpusRecord from_json(const nlohmann::json& j);

  // Throws ValidationError when answer_pred is missing.
  ScoringSample to_sample() const;
};

// Validates every line: required string fields, non-empty answer_gt, unique
// ids. Errors carry the 1-based line number.
std::vector<CorpusRecord> parse_corpus(std::istream& in);
std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path);

// Compact single-line JSON; invalid UTF-8 is replaced rather than thrown.
std::string dump_line(const nlohmann::ordered_json& row);

void write_jsonl(std::ostream& out, const std::vector<nlohmann::ordered_json>& rows);
void write_corpus(std::ostream& out, const std::vector<CorpusRecord>& records);

// Writes the whole buffer or throws IoError; parent directories are created.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace molhallu
