#include "cellac/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

#include "cellac/text.hpp"

namespace cellac {

namespace {

const std::vector<RowRef> kNoRows;
const std::vector<ColumnRef> kNoColumns;
const std::vector<CellRef> kNoCells;
const std::vector<std::uint32_t> kNoTables;

std::uint64_t meta_field(const nlohmann::json& meta, const char* key, std::uint64_t fallback) {
  auto it = meta.find(key);
  if (it == meta.end() || !it->is_number()) return fallback;
  auto v = it->get<double>();
  return v < 0 ? 0 : static_cast<std::uint64_t>(v);
}

}  // namespace

std::optional<std::size_t> RelationalTable::column_of(std::string_view heading) const {
  auto key = normalize_label(heading);
  for (std::size_t c = 0; c < headings.size(); ++c)
    if (headings[c] == key) return c;
  return std::nullopt;
}

std::optional<std::size_t> RelationalTable::row_of(std::string_view entity) const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& e = rows[r][core_column].entity;
    if (e && *e == entity) return r;
  }
  return std::nullopt;
}

std::size_t RelationalTable::empty_cells() const {
  std::size_t n = 0;
  for (const auto& row : rows)
    for (const auto& cell : row)
      if (!cell.linked() && is_empty_text(cell.text)) ++n;
  return n;
}

double entity_rate(const RelationalTable& table, std::size_t col) {
  if (col >= table.num_cols()) throw std::out_of_range("entity_rate: column out of range");
  if (table.rows.empty()) return 0.0;
  std::size_t linked = 0;
  for (const auto& row : table.rows)
    if (row[col].linked()) ++linked;
  return static_cast<double>(linked) / static_cast<double>(table.rows.size());
}

std::size_t detect_core_column(const RelationalTable& table) {
  if (table.num_cols() < 2) return 0;
  return entity_rate(table, 1) > entity_rate(table, 0) ? 1 : 0;
}

void normalize_table(RelationalTable& table) {
  for (std::size_t c = 0; c < table.num_cols(); ++c) {
    std::vector<ColumnCell> cells;
    cells.reserve(table.rows.size());
    for (const auto& row : table.rows) cells.push_back({row[c].text, row[c].linked()});
    auto types = detect_column_type(cells, table.headings[c]);
    const ValueType primary = *types.begin();
    for (auto& row : table.rows) {
      auto& cell = row[c];
      if (cell.linked()) {
        cell.norm = NormalizedValue{ValueType::Entity, EntityRef{*cell.entity}};
      } else if (is_empty_text(cell.text)) {
        cell.norm.reset();
      } else {
        auto own = classify_cell(cell.text, table.headings[c], false);
        auto t = types.count(own) ? own : primary;
        if (t == ValueType::Other || t == ValueType::Entity) t = ValueType::String;
        cell.norm = normalize(cell.text, t);
      }
    }
  }
}

RelationalTable table_from_json(const nlohmann::json& record) {
  if (!record.is_object()) throw std::invalid_argument("record is not an object");
  auto hs = record.find("headings");
  auto rs = record.find("rows");
  if (hs == record.end() || !hs->is_array()) throw std::invalid_argument("record missing `headings`");
  if (rs == record.end() || !rs->is_array()) throw std::invalid_argument("record missing `rows`");
  RelationalTable t;
  t.id = record.value("id", std::string{});
  t.page_title = record.value("pageTitle", std::string{});
  t.caption = record.value("caption", std::string{});
  for (const auto& h : *hs) {
    if (!h.is_string()) throw std::invalid_argument("heading is not a string");
    t.headings.push_back(normalize_label(h.get<std::string>()));
  }
  if (t.headings.empty()) throw std::invalid_argument("record has no headings");
  for (const auto& r : *rs) {
    if (!r.is_array() || r.size() != t.headings.size()) throw std::invalid_argument("row length != |headings|");
    std::vector<Cell> row;
    row.reserve(r.size());
    for (const auto& c : r) {
      Cell cell;
      if (c.is_string()) {
        cell.text = c.get<std::string>();
      } else if (c.is_object()) {
        cell.text = c.value("text", std::string{});
        if (auto e = c.find("entity"); e != c.end() && e->is_string() && !e->get<std::string>().empty())
          cell.entity = e->get<std::string>();
      } else if (!c.is_null()) {
        throw std::invalid_argument("cell is neither string nor object");
      }
      row.push_back(std::move(cell));
    }
    t.rows.push_back(std::move(row));
  }
  if (auto m = record.find("meta"); m != record.end() && m->is_object()) {
    t.meta.in_links = meta_field(*m, "inLinks", 0);
    t.meta.out_links = meta_field(*m, "outLinks", 0);
    t.meta.page_views = meta_field(*m, "pageViews", 0);
    t.meta.tables_on_page = std::max<std::uint64_t>(1, meta_field(*m, "tablesOnPage", 1));
    t.meta.table_chars = meta_field(*m, "tableChars", 0);
    t.meta.page_chars = meta_field(*m, "pageChars", 0);
  }
  t.core_column = detect_core_column(t);
  normalize_table(t);
  return t;
}

nlohmann::json table_to_json(const RelationalTable& t) {
  nlohmann::json rec;
  rec["id"] = t.id;
  rec["pageTitle"] = t.page_title;
  rec["caption"] = t.caption;
  rec["headings"] = t.headings;
  auto& rows = rec["rows"] = nlohmann::json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::json::array();
    for (const auto& c : row) {
      nlohmann::json cell;
      cell["text"] = c.text;
      if (c.entity) cell["entity"] = *c.entity;
      r.push_back(std::move(cell));
    }
    rows.push_back(std::move(r));
  }
  rec["meta"] = {{"inLinks", t.meta.in_links},       {"outLinks", t.meta.out_links},
                 {"pageViews", t.meta.page_views},   {"tablesOnPage", t.meta.tables_on_page},
                 {"tableChars", t.meta.table_chars}, {"pageChars", t.meta.page_chars}};
  return rec;
}

Corpus::Corpus(std::vector<RelationalTable> tables, std::size_t skipped) : skipped_(skipped) {
  std::stable_sort(tables.begin(), tables.end(),
                   [](const RelationalTable& a, const RelationalTable& b) { return a.id < b.id; });
  tables_.reserve(tables.size());
  for (auto& t : tables) {
    if (!by_id_.emplace(t.id, tables_.size()).second) {
      ++skipped_;
      continue;
    }
    tables_.push_back(std::move(t));
  }
  build_index();
}

Corpus Corpus::ingest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read corpus file: " + path.string());
  return ingest_stream(in);
}

Corpus Corpus::ingest_stream(std::istream& in) {
  std::vector<RelationalTable> tables;
  std::set<std::string> seen;
  std::size_t skipped = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    try {
      auto rec = nlohmann::json::parse(line);
      auto t = table_from_json(rec);
      if (t.id.empty()) throw std::invalid_argument("record missing `id`");
      if (!seen.insert(t.id).second) throw std::invalid_argument("duplicate table id " + t.id);
      tables.push_back(std::move(t));
    } catch (const std::exception&) {
      ++skipped;
    }
  }
  return Corpus(std::move(tables), skipped);
}

void Corpus::build_index() {
  index_ = CorpusIndex{};
  for (std::uint32_t ti = 0; ti < tables_.size(); ++ti) {
    const auto& t = tables_[ti];
    std::set<std::string> terms;
    for (auto& w : tokenize(t.page_title)) terms.insert(w);
    for (auto& w : tokenize(t.caption)) terms.insert(w);
    for (const auto& h : t.headings)
      for (auto& w : tokenize(h)) terms.insert(w);
    for (const auto& w : terms) ++index_.doc_freqs[w];

    for (std::uint32_t c = 0; c < t.num_cols(); ++c) {
      index_.by_heading[t.headings[c]].push_back({ti, c});
      auto& he = index_.heading_empty[t.headings[c]];
      for (const auto& row : t.rows) {
        ++he.second;
        if (row[c].empty()) ++he.first;
      }
    }
    for (std::uint32_t r = 0; r < t.num_rows(); ++r) {
      const auto& e = t.rows[r][t.core_column].entity;
      if (!e) continue;
      index_.by_entity[*e].push_back({ti, r});
      auto& et = index_.entity_tables[*e];
      if (et.empty() || et.back() != ti) et.push_back(ti);
      for (std::uint32_t c = 0; c < t.num_cols(); ++c) {
        if (c == t.core_column) continue;
        index_.by_entity_heading[{*e, t.headings[c]}].push_back({ti, r, c});
      }
    }
  }
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

const std::vector<RowRef>& Corpus::rows_of(std::string_view entity) const {
  auto it = index_.by_entity.find(std::string(entity));
  return it == index_.by_entity.end() ? kNoRows : it->second;
}

const std::vector<ColumnRef>& Corpus::columns_of(std::string_view heading) const {
  auto it = index_.by_heading.find(std::string(heading));
  return it == index_.by_heading.end() ? kNoColumns : it->second;
}

const std::vector<CellRef>& Corpus::cells_of(std::string_view entity, std::string_view heading) const {
  auto it = index_.by_entity_heading.find({std::string(entity), std::string(heading)});
  return it == index_.by_entity_heading.end() ? kNoCells : it->second;
}

const std::vector<std::uint32_t>& Corpus::tables_with_entity(std::string_view entity) const {
  auto it = index_.entity_tables.find(std::string(entity));
  return it == index_.entity_tables.end() ? kNoTables : it->second;
}

std::uint32_t Corpus::doc_freq(const std::string& term) const {
  auto it = index_.doc_freqs.find(term);
  return it == index_.doc_freqs.end() ? 0 : it->second;
}

double Corpus::empty_rate(std::string_view heading) const {
  auto it = index_.heading_empty.find(std::string(heading));
  if (it == index_.heading_empty.end() || it->second.second == 0) return 0.0;
  return static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
}

Corpus Corpus::relational_filter(double min_rate) const {
  std::vector<RelationalTable> kept;
  for (const auto& t : tables_)
    if (entity_rate(t, t.core_column) >= min_rate) kept.push_back(t);
  return Corpus(std::move(kept));
}

Corpus Corpus::without(const std::vector<std::string>& ids) const {
  std::set<std::string> drop(ids.begin(), ids.end());
  std::vector<RelationalTable> kept;
  for (const auto& t : tables_)
    if (!drop.count(t.id)) kept.push_back(t);
  return Corpus(std::move(kept));
}

void Corpus::write_jsonl(std::ostream& out) const {
  for (const auto& t : tables_) out << table_to_json(t).dump() << '\n';
}

}  // namespace cellac
