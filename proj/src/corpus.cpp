#include "molhallu/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "molhallu/errors.hpp"

namespace molhallu {

namespace {

std::string required_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ValidationError(std::string("missing or non-string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

nlohmann::ordered_json CorpusRecord::to_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["smiles"] = smiles;
  j["question"] = question;
  j["answer_gt"] = answer_gt;
  if (answer_pred) j["answer_pred"] = *answer_pred;
  if (description) j["description"] = *description;
  return j;
}

CorpusRecord CorpusRecord::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("corpus row must be a JSON object");
  CorpusRecord r;
  r.id = required_string(j, "id");
  r.smiles = optional_string(j, "smiles").value_or("");
  r.question = optional_string(j, "question").value_or("");
  r.answer_gt = required_string(j, "answer_gt");
  r.answer_pred = optional_string(j, "answer_pred");
  r.description = optional_string(j, "description");
  if (r.id.empty()) throw ValidationError("empty id");
  if (blank(r.answer_gt)) throw ValidationError("empty answer_gt");
  return r;
}

ScoringSample CorpusRecord::to_sample() const {
  if (!answer_pred) throw ValidationError("record '" + id + "' has no answer_pred");
  return ScoringSample{id, smiles, question, *answer_pred, answer_gt, description.value_or("")};
}

std::vector<CorpusRecord> parse_corpus(std::istream& in) {
  std::vector<CorpusRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      auto record = CorpusRecord::from_json(nlohmann::json::parse(line));
      if (!seen.insert(record.id).second) throw ValidationError("duplicate id '" + record.id + "'");
      records.push_back(std::move(record));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("corpus line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (in.bad()) throw IoError("failed while reading corpus");
  return records;
}

std::vector<CorpusRecord> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return parse_corpus(in);
}

std::string dump_line(const nlohmann::ordered_json& row) {
  return row.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

void write_jsonl(std::ostream& out, const std::vector<nlohmann::ordered_json>& rows) {
  for (const auto& row : rows) out << dump_line(row) << '\n';
}

void write_corpus(std::ostream& out, const std::vector<CorpusRecord>& records) {
  for (const auto& r : records) out << dump_line(r.to_json()) << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace molhallu
