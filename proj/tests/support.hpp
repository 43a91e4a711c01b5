#pragma once

#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "molhallu/lexicon.hpp"
#include "molhallu/textproc.hpp"
#include "oracles.hpp"

namespace support {

inline std::filesystem::path data_dir() { return MOLHALLU_DATA_DIR; }

inline molhallu::EntityLexicon make_lexicon(
    std::initializer_list<std::pair<const char*, molhallu::EntityType>> rows) {
  molhallu::EntityLexicon::Builder b;
  for (const auto& [surface, type] : rows) b.add(surface, type);
  return std::move(b).build();
}

inline molhallu::EntityLexicon make_lexicon(const std::vector<std::pair<std::string, molhallu::EntityType>>& rows) {
  molhallu::EntityLexicon::Builder b;
  for (const auto& [surface, type] : rows) b.add(surface, type);
  return std::move(b).build();
}

inline molhallu::EntityLexicon parse_tsv(const std::string& text) {
  std::istringstream in(text);
  return molhallu::parse_lexicon(in, molhallu::LexiconFormat::Tsv);
}

inline std::vector<std::string> toks(const std::string& text) { return molhallu::tokenize(text).tokens; }

// The lexicon as a plain entry list for the oracles, indexed by record id.
inline oracle::Entries entries_of(const molhallu::EntityLexicon& lex) {
  oracle::Entries e;
  for (const auto& r : lex.records()) e.push_back(r.tokens);
  return e;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("molhallu_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
