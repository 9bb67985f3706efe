#include "cellac/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cellac/text.hpp"
#include "json.hpp"

namespace cellac {

const RelationalTable& TestCollection::input_table(const TestCell& c) const {
  for (const auto& t : input_tables)
    if (t.id == c.table_id) return t;
  throw std::out_of_range("no input table " + c.table_id);
}

TestCollection build_test_collection(const Corpus& corpus, std::size_t per_type, std::size_t cells_per_column,
                                     std::uint64_t seed, const SamplingRules& rules) {
  struct Column {
    std::size_t table;
    std::size_t col;
    std::vector<std::size_t> rows;  // rows with a linked core entity
  };
  std::map<ValueType, std::vector<Column>> eligible;
  for (std::size_t ti = 0; ti < corpus.size(); ++ti) {
    const auto& t = corpus.table(ti);
    if (t.num_rows() < rules.min_rows || t.num_cols() < rules.min_cols) continue;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < t.num_rows(); ++r)
      if (t.core_entity(r)) rows.push_back(r);
    if (rows.size() < cells_per_column) continue;
    for (std::size_t c = 0; c < t.num_cols(); ++c) {
      if (c == t.core_column || utf8_decode(t.headings[c]).size() < rules.min_heading_chars) continue;
      std::vector<ColumnCell> cells;
      for (const auto& row : t.rows) cells.push_back({row[c].text, row[c].linked()});
      const auto types = detect_column_type(cells, t.headings[c]);
      if (types.size() != 1) continue;
      const auto type = *types.begin();
      if (std::find(main_types().begin(), main_types().end(), type) == main_types().end()) continue;
      if (column_type_agreement(cells, t.headings[c], type) < rules.min_type_agreement) continue;
      eligible[type].push_back({ti, c, rows});
    }
  }

  std::mt19937_64 rng(seed);
  std::set<std::size_t> used_tables;
  TestCollection out;
  for (ValueType type : main_types()) {
    auto cols = eligible[type];
    std::shuffle(cols.begin(), cols.end(), rng);
    std::size_t taken = 0;
    for (const auto& col : cols) {
      if (taken == per_type) break;
      if (used_tables.count(col.table)) continue;
      used_tables.insert(col.table);
      ++taken;
      const auto& t = corpus.table(col.table);
      auto rows = col.rows;
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(cells_per_column);
      std::sort(rows.begin(), rows.end());
      for (auto r : rows) {
        TestCell cell;
        cell.table_id = t.id;
        cell.row = r;
        cell.col = col.col;
        cell.cell_id = t.id + "#r" + std::to_string(r) + "c" + std::to_string(col.col);
        cell.entity = *t.core_entity(r);
        cell.heading = t.headings[col.col];
        cell.type = type;
        const auto& c = t.rows[r][col.col];
        if (!c.empty()) cell.concealed = c.text;
        out.cells.push_back(std::move(cell));
      }
    }
    if (taken < per_type)
      throw std::runtime_error("not enough qualifying columns of type " + std::string(to_string(type)) + " (" +
                               std::to_string(taken) + " of " + std::to_string(per_type) + ")");
  }
  std::vector<std::string> ids;
  for (auto ti : used_tables) {
    out.input_tables.push_back(corpus.table(ti));
    ids.push_back(corpus.table(ti).id);
  }
  out.corpus = corpus.without(ids);
  return out;
}

void write_testset(std::ostream& out, const TestCollection& tc) {
  out << kTestsetHeader << '\n';
  for (const auto& t : tc.input_tables) out << nlohmann::json{{"table", table_to_json(t)}}.dump() << '\n';
  for (const auto& c : tc.cells)
    out << nlohmann::json{{"cell",
                           {{"id", c.cell_id},
                            {"table", c.table_id},
                            {"entity", c.entity},
                            {"heading", c.heading},
                            {"row", c.row},
                            {"col", c.col},
                            {"type", std::string(to_string(c.type))},
                            {"concealed", c.concealed}}}}
               .dump()
        << '\n';
}

void write_testset(const std::filesystem::path& file, const TestCollection& tc) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  write_testset(out, tc);
}

TestCollection read_testset(std::istream& in) {
  TestCollection tc;
  std::string line;
  if (!std::getline(in, line) || trim(line) != kTestsetHeader) throw std::runtime_error("not a cellac test set");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.contains("table")) {
        tc.input_tables.push_back(table_from_json(j["table"]));
      } else {
        const auto& c = j.at("cell");
        TestCell cell;
        cell.cell_id = c.at("id").get<std::string>();
        cell.table_id = c.at("table").get<std::string>();
        cell.entity = c.at("entity").get<std::string>();
        cell.heading = c.at("heading").get<std::string>();
        cell.row = c.at("row").get<std::size_t>();
        cell.col = c.at("col").get<std::size_t>();
        auto type = value_type_from_string(c.at("type").get<std::string>());
        if (!type) throw std::invalid_argument("unknown type");
        cell.type = *type;
        cell.concealed = c.at("concealed").get<std::string>();
        tc.cells.push_back(std::move(cell));
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("test set line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (const auto& c : tc.cells) {
    const auto& t = tc.input_table(c);
    if (c.row >= t.num_rows() || c.col >= t.num_cols())
      throw std::runtime_error("test cell " + c.cell_id + " out of range");
  }
  return tc;
}

TestCollection read_testset(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  return read_testset(in);
}

RelationalTable conceal(const RelationalTable& table, const TestCell& cell) {
  RelationalTable t = table;
  auto& c = t.rows.at(cell.row).at(cell.col);
  c.text.clear();
  c.entity.reset();
  c.norm.reset();
  return t;
}

Qrels qrels_from_originals(const TestCollection& tc) {
  Qrels q;
  for (const auto& cell : tc.cells) {
    const auto& c = tc.input_table(cell).rows[cell.row][cell.col];
    q[cell.cell_id].insert(c.empty() ? std::string(kEmptyValue) : c.norm->render());
  }
  return q;
}

Qrels read_qrels(std::istream& in) {
  Qrels q;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto parts = split(line, '\t');
    if (parts.size() != 3) throw std::runtime_error("malformed qrels line " + std::to_string(lineno));
    if (trim(parts[2]) != "0") q[parts[0]].insert(parts[1]);
    else q[parts[0]];
  }
  return q;
}

Qrels read_qrels(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return read_qrels(in);
}

void write_qrels(std::ostream& out, const Qrels& qrels) {
  for (const auto& [cell, values] : qrels)
    for (const auto& v : values) out << cell << '\t' << v << "\t1\n";
}

Run read_run(std::istream& in) {
  std::map<std::string, std::vector<std::pair<long, std::string>>> tmp;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto parts = split(line, '\t');
    long rank = 0;
    if (parts.size() < 3 ||
        std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), rank).ec != std::errc{})
      throw std::runtime_error("malformed run line " + std::to_string(lineno));
    tmp[parts[0]].emplace_back(rank, parts[2]);
  }
  Run run;
  for (auto& [cell, items] : tmp) {
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& r = run[cell];
    for (auto& [rank, v] : items) r.push_back(std::move(v));
  }
  return run;
}

Run read_run(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return read_run(in);
}

bool same_value(const std::string& a, const std::string& b) {
  if (a == b) return true;
  const bool ea = a == kEmptyValue, eb = b == kEmptyValue;
  if (ea || eb) return false;
  return values_equal(normalize_free(a, ""), normalize_free(b, ""));
}

double ndcg_at_k(const std::vector<int>& gains, std::size_t num_relevant, std::size_t k) {
  if (k < 1) throw std::invalid_argument("NDCG cut-off must be at least 1");
  double dcg = 0, idcg = 0;
  for (std::size_t i = 0; i < std::min(k, gains.size()); ++i)
    if (gains[i] > 0) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  for (std::size_t i = 0; i < std::min(k, num_relevant); ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return idcg == 0 ? 0.0 : dcg / idcg;
}

double ndcg_at_k(const std::vector<std::string>& ranking, const std::set<std::string>& correct, std::size_t k) {
  std::vector<std::string> remaining(correct.begin(), correct.end());
  std::vector<int> gains;
  gains.reserve(std::min(k, ranking.size()));
  for (std::size_t i = 0; i < ranking.size() && i < k; ++i) {
    auto it = std::find_if(remaining.begin(), remaining.end(),
                           [&](const std::string& c) { return same_value(ranking[i], c); });
    if (it == remaining.end()) {
      gains.push_back(0);
    } else {
      gains.push_back(1);
      remaining.erase(it);
    }
  }
  return ndcg_at_k(gains, correct.size(), k);
}

EvalReport evaluate(const Run& run, const Qrels& qrels) {
  for (const auto& [cell, r] : run)
    if (!qrels.count(cell)) throw std::invalid_argument("run cell " + cell + " has no qrels entry");
  static const std::vector<std::string> kNothing;
  EvalReport rep;
  double ex5 = 0, ex10 = 0, in5 = 0, in10 = 0;
  for (const auto& [cell, truth] : qrels) {
    auto it = run.find(cell);
    const auto& ranking = it == run.end() ? kNothing : it->second;
    const double i5 = ndcg_at_k(ranking, truth, 5), i10 = ndcg_at_k(ranking, truth, 10);
    rep.per_cell_included[cell] = {i5, i10};
    in5 += i5;
    in10 += i10;
    ++rep.included.cells;

    std::set<std::string> truth_ex;
    for (const auto& v : truth)
      if (v != kEmptyValue) truth_ex.insert(v);
    if (truth_ex.empty()) continue;
    std::vector<std::string> ranking_ex;
    for (const auto& v : ranking)
      if (v != kEmptyValue) ranking_ex.push_back(v);
    const double e5 = ndcg_at_k(ranking_ex, truth_ex, 5), e10 = ndcg_at_k(ranking_ex, truth_ex, 10);
    rep.per_cell_excluded[cell] = {e5, e10};
    ex5 += e5;
    ex10 += e10;
    ++rep.excluded.cells;
  }
  if (rep.included.cells) {
    rep.included.ndcg5 = in5 / static_cast<double>(rep.included.cells);
    rep.included.ndcg10 = in10 / static_cast<double>(rep.included.cells);
  }
  if (rep.excluded.cells) {
    rep.excluded.ndcg5 = ex5 / static_cast<double>(rep.excluded.cells);
    rep.excluded.ndcg10 = ex10 / static_cast<double>(rep.excluded.cells);
  }
  return rep;
}

CollectionStats collection_stats(const Qrels& qrels) {
  CollectionStats s;
  std::size_t values = 0, empty = 0;
  for (const auto& [cell, truth] : qrels) {
    ++s.cells;
    for (const auto& v : truth) {
      if (v == kEmptyValue)
        ++empty;
      else
        ++values;
    }
  }
  if (s.cells) {
    s.avg_values = static_cast<double>(values) / static_cast<double>(s.cells);
    s.empty_rate = static_cast<double>(empty) / static_cast<double>(s.cells);
  }
  return s;
}

void write_report_text(std::ostream& out, const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::size_t width = 6;
  for (const auto& [name, r] : rows) width = std::max(width, name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "method"
      << "  excl@5   excl@10  incl@5   incl@10\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& [name, r] : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << name << "  " << r.excluded.ndcg5 << "   "
        << r.excluded.ndcg10 << "   " << r.included.ndcg5 << "   " << r.included.ndcg10 << '\n';
  }
  if (!rows.empty())
    out << "cells: " << rows.front().second.excluded.cells << " (Empty excluded), "
        << rows.front().second.included.cells << " (Empty included)\n";
  out.unsetf(std::ios::fixed);
}

std::string report_json(const std::vector<std::pair<std::string, EvalReport>>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [name, r] : rows) {
    j.push_back({{"method", name},
                 {"empty_excluded", {{"cells", r.excluded.cells}, {"ndcg@5", r.excluded.ndcg5}, {"ndcg@10", r.excluded.ndcg10}}},
                 {"empty_included", {{"cells", r.included.cells}, {"ndcg@5", r.included.ndcg5}, {"ndcg@10", r.included.ndcg10}}}});
  }
  return j.dump(2);
}

}  // namespace cellac
