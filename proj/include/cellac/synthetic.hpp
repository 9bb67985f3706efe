#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cellac/corpus.hpp"
#include "cellac/kb.hpp"
#include "cellac/table_match.hpp"
#include "cellac/types.hpp"

namespace cellac {

struct Truth;
struct TestCell;

/// Knobs of the generated world. Defaults give a corpus of a few hundred
/// tables with enough noise in both sources that neither one alone suffices,
/// and the whole benchmark runs in seconds.
struct SyntheticParams {
  std::uint64_t seed = 1;
  std::size_t topics = 4;
  std::size_t entities_per_topic = 80;
  std::size_t attributes_per_topic = 7;
  std::size_t main_tables_per_topic = 40;
  std::size_t distractor_tables_per_topic = 25;
  std::size_t min_rows = 6;
  std::size_t max_rows = 12;
  std::size_t min_attr_cols = 3;
  std::size_t max_attr_cols = 5;
  /// Attributes per topic whose heading collides with an unrelated one.
  std::size_t collisions_per_topic = 3;
  double table_missing = 0.12;  // existing value left blank
  double table_noise = 0.25;    // wrong value in a table
  double table_junk = 0.2;      // value where the truth is empty
  double kb_coverage_min = 0.45;
  double kb_coverage_max = 0.9;
  double kb_noise = 0.2;
  std::size_t tmatch_pairs = 600;
};

/// Generated corpus, KB and the planted truth behind every table column.
struct SyntheticWorld {
  std::vector<RelationalTable> tables;
  KnowledgeBase kb;
  std::vector<Triple> triples;
  std::map<std::string, std::string> labels;
  std::vector<GradedPair> tmatch_pairs;
  /// table id -> attribute id per column ("" for the core column).
  std::map<std::string, std::vector<std::string>> column_attribute;
  /// (entity, attribute) -> true value; absent means the cell should be empty.
  std::map<std::pair<std::string, std::string>, NormalizedValue> truth;

  Corpus corpus() const { return Corpus(tables); }
  /// Planted truth for a cell of one of the generated tables.
  Truth truth_for(const std::string& table_id, std::size_t col, const std::string& entity) const;
  Truth truth_for(const TestCell& cell) const;

  /// corpus.jsonl, triples.tsv, labels.tsv, tmatch_pairs.tsv.
  void write(const std::filesystem::path& dir) const;
};

SyntheticWorld generate_world(const SyntheticParams& params);

}  // namespace cellac
