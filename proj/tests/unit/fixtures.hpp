#pragma once

#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cellac/corpus.hpp"
#include "cellac/kb.hpp"
#include "json.hpp"

namespace cellac::test {

// Cell shorthand: "@id" is a linked entity whose text is the id with '_'
// shown as ' '; anything else is plain text.
inline nlohmann::json cell_json(const std::string& s) {
  if (s.size() > 1 && s[0] == '@') {
    std::string text = s.substr(1);
    for (auto& ch : text)
      if (ch == '_') ch = ' ';
    return {{"text", text}, {"entity", s.substr(1)}};
  }
  return s;
}

inline nlohmann::json table_json(const std::string& id, const std::vector<std::string>& headings,
                                 const std::vector<std::vector<std::string>>& rows,
                                 const std::string& title = "") {
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : r) row.push_back(cell_json(c));
    rs.push_back(row);
  }
  return {{"id", id}, {"pageTitle", title.empty() ? id : title}, {"headings", headings}, {"rows", rs}};
}

inline RelationalTable make_table(const std::string& id, const std::vector<std::string>& headings,
                                  const std::vector<std::vector<std::string>>& rows, const std::string& title = "") {
  return table_from_json(table_json(id, headings, rows, title));
}

inline KnowledgeBase make_kb(const std::vector<Triple>& triples,
                             const std::vector<std::pair<std::string, std::string>>& labels = {}) {
  KnowledgeBase kb;
  for (const auto& t : triples) kb.add(t);
  for (const auto& [p, l] : labels) kb.set_label(p, l);
  return kb;
}

// A small film corpus: three tables agree on directors and release years
// under different headings; the KB knows some of the same facts.
inline Corpus film_corpus() {
  std::vector<RelationalTable> t;
  t.push_back(make_table("films_a", {"Film", "Director", "Year"},
                         {{"@Alien", "@Ridley_Scott", "1979"},
                          {"@Heat", "@Michael_Mann", "1995"},
                          {"@Jaws", "@Steven_Spielberg", "1975"},
                          {"@Brazil", "@Terry_Gilliam", "1985"},
                          {"@Ran", "@Akira_Kurosawa", "1985"}},
                         "List of thriller films"));
  t.push_back(make_table("films_b", {"Title", "Directed by", "Released"},
                         {{"@Alien", "@Ridley_Scott", "1979"},
                          {"@Heat", "@Michael_Mann", "1995"},
                          {"@Jaws", "@Steven_Spielberg", "1975"},
                          {"@Gattaca", "@Andrew_Niccol", "1997"}},
                         "Films of the 1970s and 1990s"));
  t.push_back(make_table("films_c", {"Film", "Director", "Studio"},
                         {{"@Alien", "@Ridley_Scott", "@Fox"},
                          {"@Jaws", "@Steven_Spielberg", "@Universal"},
                          {"@Gattaca", "@Andrew_Niccol", "@Columbia"},
                          {"@Brazil", "@Terry_Gilliam", "@Universal"}},
                         "List of science fiction films"));
  t.push_back(make_table("cities", {"City", "Country", "Population"},
                         {{"@Berlin", "@Germany", "3,644,826"},
                          {"@Paris", "@France", "2,165,423"},
                          {"@Rome", "@Italy", "2,873,000"}},
                         "Largest cities"));
  return Corpus(std::move(t));
}

inline KnowledgeBase film_kb() {
  return make_kb({{"Alien", "dbo:director", "<Ridley_Scott>"},
                  {"Heat", "dbo:director", "<Michael_Mann>"},
                  {"Ran", "dbo:director", "<Akira_Kurosawa>"},
                  {"Gattaca", "dbo:director", "<Andrew_Niccol>"},
                  {"Gattaca", "dbo:writer", "<Andrew_Niccol>"},
                  {"Brazil", "dbo:director", "<Terry_Gilliam>"},
                  {"Alien", "dbo:releaseYear", "1979"},
                  {"Heat", "dbo:releaseYear", "1995"},
                  {"Jaws", "dbo:releaseYear", "1975"}},
                 {{"dbo:director", "director"}, {"dbo:writer", "writer"}, {"dbo:releaseYear", "release year"}});
}

// `n` country tables, each with one clean column of every main type, so
// stratified sampling can take up to n/4 columns per type from distinct
// tables. Consecutive tables share countries and agree on their values.
inline Corpus four_type_corpus(std::size_t n, std::size_t rows = 6) {
  const std::vector<std::string> countries = {"France", "Italy", "Spain", "Chile", "Peru", "Japan",
                                              "Kenya", "Ghana", "Nepal", "Laos", "Cuba", "Fiji"};
  const std::vector<std::string> mottos = {"liberty and unity", "strength in unity", "plus ultra",
                                           "by reason or force", "firm and happy", "peace and order",
                                           "all for all", "freedom and justice", "mother land",
                                           "peace and progress", "homeland or death", "fear god"};
  std::vector<RelationalTable> t;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<std::string>> rs;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t k = (i + r) % countries.size();
      rs.push_back({"@" + countries[k], "@Capital_" + countries[k], std::to_string(1000 + 37 * k) + " km2",
                    mottos[k], std::to_string(1 + k) + " May " + std::to_string(1800 + 11 * k)});
    }
    t.push_back(make_table("country_" + std::to_string(i), {"Country", "Capital", "Area", "Motto", "Founded"}, rs,
                           "Countries list " + std::to_string(i)));
  }
  return Corpus(std::move(t));
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cellac_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace cellac::test
