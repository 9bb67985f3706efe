#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "cellac/corpus.hpp"
#include "cellac/types.hpp"

namespace cellac {

/// A concealed cell of a test table.
struct TestCell {
  std::string cell_id;
  std::string table_id;
  std::string entity;
  std::string heading;
  std::size_t row = 0;
  std::size_t col = 0;
  ValueType type = ValueType::String;
  /// Original text; empty when the cell was empty.
  std::string concealed;
};

struct TestCollection {
  std::vector<TestCell> cells;
  /// Source tables of the cells, kept out of `corpus`.
  std::vector<RelationalTable> input_tables;
  Corpus corpus;

  const RelationalTable& input_table(const TestCell& c) const;
};

struct SamplingRules {
  std::size_t min_rows = 5;
  std::size_t min_cols = 3;
  std::size_t min_heading_chars = 4;
  double min_type_agreement = 0.8;
};

inline const std::vector<ValueType>& main_types() {
  static const std::vector<ValueType> t = {ValueType::Entity, ValueType::Quantity, ValueType::String,
                                           ValueType::DateTime};
  return t;
}

/// Stratified sample: `per_type` columns of each main type, each from a
/// distinct table, then `cells_per_column` rows with a linked core entity.
/// Throws std::runtime_error naming the type when too few columns qualify.
TestCollection build_test_collection(const Corpus& corpus, std::size_t per_type, std::size_t cells_per_column,
                                     std::uint64_t seed, const SamplingRules& rules = {});

/// JSONL with a version header: one line per source table, then one per
/// cell. The reduced corpus is not stored.
void write_testset(std::ostream& out, const TestCollection& tc);
void write_testset(const std::filesystem::path& file, const TestCollection& tc);
/// Throws std::runtime_error on a bad header or record.
TestCollection read_testset(std::istream& in);
TestCollection read_testset(const std::filesystem::path& file);

inline constexpr const char* kTestsetHeader = "# cellac-testset v1";

/// Copy of the source table with the test cell's value removed.
RelationalTable conceal(const RelationalTable& table, const TestCell& cell);

inline constexpr const char* kEmptyValue = "EMPTY";

/// cell id -> correct canonical values ("EMPTY" for the sentinel).
using Qrels = std::map<std::string, std::set<std::string>>;
/// cell id -> canonical values in rank order.
using Run = std::map<std::string, std::vector<std::string>>;

/// Qrels from the concealed values themselves: the original canonical value,
/// or EMPTY for cells that were empty.
Qrels qrels_from_originals(const TestCollection& tc);

Qrels read_qrels(std::istream& in);
Qrels read_qrels(const std::filesystem::path& file);
void write_qrels(std::ostream& out, const Qrels& qrels);
/// Reads `cell_id␉rank␉value␉score␉provenance`; ranks order the values.
Run read_run(std::istream& in);
Run read_run(const std::filesystem::path& file);

/// Equal canonical strings, or equal after free-standing normalization.
bool same_value(const std::string& a, const std::string& b);

/// Binary-gain NDCG with a log2(i+1) discount. `num_relevant` is the size of
/// the correct set (for the ideal ranking). Throws std::invalid_argument for
/// k < 1.
double ndcg_at_k(const std::vector<int>& gains, std::size_t num_relevant, std::size_t k);
double ndcg_at_k(const std::vector<std::string>& ranking, const std::set<std::string>& correct, std::size_t k);

struct ConditionMetrics {
  std::size_t cells = 0;
  double ndcg5 = 0.0;
  double ndcg10 = 0.0;
};

struct EvalReport {
  ConditionMetrics excluded;  // Empty excluded
  ConditionMetrics included;  // Empty included
  std::map<std::string, std::pair<double, double>> per_cell_excluded;  // cell -> (ndcg5, ndcg10)
  std::map<std::string, std::pair<double, double>> per_cell_included;
};

/// Throws std::invalid_argument when a run cell is missing from the qrels.
/// Qrels cells absent from the run score 0.
EvalReport evaluate(const Run& run, const Qrels& qrels);

struct CollectionStats {
  std::size_t cells = 0;
  double avg_values = 0.0;  // mean number of correct non-Empty values
  double empty_rate = 0.0;  // fraction of cells whose truth includes Empty
};

CollectionStats collection_stats(const Qrels& qrels);

void write_report_text(std::ostream& out, const std::vector<std::pair<std::string, EvalReport>>& rows);
std::string report_json(const std::vector<std::pair<std::string, EvalReport>>& rows);

}  // namespace cellac
