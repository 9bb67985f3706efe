#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cellac/types.hpp"
#include "json.hpp"

namespace cellac {

struct Cell {
  std::string text;
  std::optional<std::string> entity;
  /// Absent for empty cells.
  std::optional<NormalizedValue> norm;

  bool linked() const { return entity.has_value(); }
  bool empty() const { return !norm.has_value(); }
};

struct PageMeta {
  std::uint64_t in_links = 0;
  std::uint64_t out_links = 0;
  std::uint64_t page_views = 0;
  std::uint64_t tables_on_page = 1;
  std::uint64_t table_chars = 0;
  std::uint64_t page_chars = 0;
};

struct RelationalTable {
  std::string id;
  std::string page_title;
  std::string caption;
  std::vector<std::string> headings;
  std::vector<std::vector<Cell>> rows;
  std::size_t core_column = 0;
  PageMeta meta;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_cols() const { return headings.size(); }
  const Cell& at(std::size_t row, std::size_t col) const { return rows.at(row).at(col); }
  std::optional<std::size_t> column_of(std::string_view heading) const;
  std::optional<std::size_t> row_of(std::string_view entity) const;
  const std::optional<std::string>& core_entity(std::size_t row) const { return rows.at(row).at(core_column).entity; }
  std::size_t empty_cells() const;
};

/// (#cells with an entity link) / (#rows) for column `col`; 0 for empty tables.
/// Throws std::out_of_range for an invalid column.
double entity_rate(const RelationalTable& table, std::size_t col);

/// Column 0 or 1, whichever has the higher entity rate; ties go left.
std::size_t detect_core_column(const RelationalTable& table);

/// Parses one corpus record (JSON object). Heading labels are normalized,
/// the core column detected and cells typed and normalized.
/// Throws std::invalid_argument for records missing `headings` or `rows`
/// or with ragged rows.
RelationalTable table_from_json(const nlohmann::json& record);
nlohmann::json table_to_json(const RelationalTable& table);

/// Types every column and fills Cell::norm. Called by table_from_json; exposed
/// for tables built in code.
void normalize_table(RelationalTable& table);

struct RowRef {
  std::uint32_t table;
  std::uint32_t row;
  auto operator<=>(const RowRef&) const = default;
};
struct ColumnRef {
  std::uint32_t table;
  std::uint32_t col;
  auto operator<=>(const ColumnRef&) const = default;
};
struct CellRef {
  std::uint32_t table;
  std::uint32_t row;
  std::uint32_t col;
  auto operator<=>(const CellRef&) const = default;
};

/// Inverted indexes over a corpus. Entity postings cover core-column cells;
/// (entity, heading) postings cover the non-core cells of those rows.
struct CorpusIndex {
  std::map<std::string, std::vector<RowRef>> by_entity;
  std::map<std::string, std::vector<ColumnRef>> by_heading;
  std::map<std::pair<std::string, std::string>, std::vector<CellRef>> by_entity_heading;
  /// term -> number of tables whose title, caption or headings contain it.
  std::unordered_map<std::string, std::uint32_t> doc_freqs;
  /// entity -> sorted distinct tables with the entity in the core column.
  std::unordered_map<std::string, std::vector<std::uint32_t>> entity_tables;
  /// heading -> (#empty cells, #cells) over columns with that label.
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> heading_empty;
};

/// Immutable set of tables plus indexes. Tables are stored sorted by id, so
/// ingestion order does not affect index contents.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<RelationalTable> tables, std::size_t skipped = 0);

  /// Loads newline-delimited JSON records; lines starting with '#' are
  /// comments. Malformed records and duplicate ids are skipped and counted. Throws std::runtime_error if unreadable.
  static Corpus ingest(const std::filesystem::path& path);
  static Corpus ingest_stream(std::istream& in);

  std::size_t size() const { return tables_.size(); }
  std::size_t skipped_count() const { return skipped_; }
  const std::vector<RelationalTable>& tables() const { return tables_; }
  const RelationalTable& table(std::size_t i) const { return tables_.at(i); }
  std::optional<std::size_t> find(std::string_view id) const;
  const CorpusIndex& index() const { return index_; }

  const std::vector<RowRef>& rows_of(std::string_view entity) const;
  const std::vector<ColumnRef>& columns_of(std::string_view heading) const;
  const std::vector<CellRef>& cells_of(std::string_view entity, std::string_view heading) const;
  const std::vector<std::uint32_t>& tables_with_entity(std::string_view entity) const;
  std::uint32_t doc_freq(const std::string& term) const;
  /// Fraction of empty cells over all columns labeled `heading`.
  double empty_rate(std::string_view heading) const;

  /// Tables whose core-column entity rate is at least `min_rate`.
  Corpus relational_filter(double min_rate) const;
  /// Copy without the listed table ids.
  Corpus without(const std::vector<std::string>& ids) const;

  void write_jsonl(std::ostream& out) const;

 private:
  void build_index();

  std::vector<RelationalTable> tables_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t skipped_ = 0;
  CorpusIndex index_;
};

}  // namespace cellac
