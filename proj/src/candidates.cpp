#include "cellac/candidates.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "cellac/corpus.hpp"
#include "cellac/edit_distance.hpp"
#include "cellac/heading_stats.hpp"
#include "cellac/kb.hpp"

namespace cellac {

std::string Candidate::canonical() const { return is_empty ? std::string(kEmptyLiteral) : value.render(); }

std::string Candidate::display() const {
  if (is_empty) return kEmptyLiteral;
  if (!kb.empty()) return kb.front().raw;
  if (!tc.empty()) return tc.front().raw;
  return value.render();
}

std::optional<ValueType> column_type_hint(const RelationalTable& table, std::size_t col,
                                          std::optional<std::size_t> skip_row) {
  if (col >= table.num_cols()) return std::nullopt;
  std::vector<ColumnCell> cells;
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    if (skip_row && *skip_row == r) continue;
    const auto& cell = table.rows[r][col];
    if (!cell.linked() && is_empty_text(cell.text)) continue;
    cells.push_back({cell.text, cell.linked()});
  }
  if (cells.empty()) return std::nullopt;
  const auto t = *detect_column_type(cells, table.headings[col]).begin();
  if (t == ValueType::Other) return std::nullopt;
  return t;
}

Target make_target(const RelationalTable& table, std::size_t row, std::size_t col) {
  if (row >= table.num_rows() || col >= table.num_cols()) throw std::invalid_argument("target cell out of range");
  const auto& e = table.core_entity(row);
  if (!e) throw std::invalid_argument("target row has no linked core entity");
  Target t;
  t.entity = *e;
  t.heading = table.headings[col];
  t.table = &table;
  t.column = col;
  t.row = row;
  t.type_hint = column_type_hint(table, col, row);
  return t;
}

std::vector<Candidate> find_tc_candidates(const Target& target, const Corpus& corpus, const HeadingStats& stats) {
  std::vector<Candidate> out;
  std::set<std::string> headings{target.heading};
  for (const auto& [hp, n] : stats.related_headings(target.heading))
    if (n > 0) headings.insert(hp);
  const std::string* skip = target.table ? &target.table->id : nullptr;
  for (const auto& hp : headings) {
    for (const auto& ref : corpus.cells_of(target.entity, hp)) {
      const auto& t = corpus.table(ref.table);
      if (skip && t.id == *skip) continue;
      const auto& cell = t.rows[ref.row][ref.col];
      if (cell.empty()) continue;
      Candidate c;
      c.value = *cell.norm;
      c.tc.push_back({ref.table, t.id, hp, ref.row, ref.col, cell.text});
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<Candidate> find_kb_candidates(const Target& target, const KnowledgeBase& kb, const HeadingStats& stats,
                                          const CandidateConfig& config) {
  std::vector<Candidate> out;
  for (const auto& p : kb.predicates_of(target.entity)) {
    const auto label = kb.label(p);
    if (stats.n_h2p(target.heading, p) == 0 && edit_sim(label, target.heading) < config.tau_ed) continue;
    for (const auto& obj : kb.lookup(target.entity, p)) {
      auto v = normalize_kb_object(obj, label, target.type_hint);
      if (v.type != ValueType::Entity && is_empty_text(obj)) continue;
      Candidate c;
      c.value = std::move(v);
      c.kb.push_back({p, label, obj});
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<Candidate> build_pool(std::vector<Candidate> tc, std::vector<Candidate> kb) {
  std::vector<Candidate> merged;
  auto absorb = [&](std::vector<Candidate>& src) {
    for (auto& c : src) {
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&](const Candidate& m) { return values_equal(m.value, c.value); });
      if (it == merged.end()) {
        merged.push_back(std::move(c));
        continue;
      }
      for (auto& e : c.tc) it->tc.push_back(std::move(e));
      for (auto& e : c.kb) it->kb.push_back(std::move(e));
    }
  };
  absorb(tc);
  absorb(kb);
  std::stable_sort(merged.begin(), merged.end(), [](const Candidate& a, const Candidate& b) {
    const auto ka = a.canonical(), kb_ = b.canonical();
    if (ka != kb_) return ka < kb_;
    return a.value.type < b.value.type;
  });
  Candidate empty;
  empty.is_empty = true;
  merged.push_back(std::move(empty));
  return merged;
}

std::vector<Candidate> find_candidates(const Target& target, const Corpus& corpus, const KnowledgeBase& kb,
                                       const HeadingStats& stats, const CandidateConfig& config) {
  return build_pool(find_tc_candidates(target, corpus, stats), find_kb_candidates(target, kb, stats, config));
}

}  // namespace cellac
