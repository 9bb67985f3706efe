#include "cellac/heading_stats.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "cellac/corpus.hpp"
#include "cellac/kb.hpp"
#include "cellac/text.hpp"

namespace cellac {

namespace {

const std::map<std::string, std::uint64_t> kNone;

template <typename M>
const std::map<std::string, std::uint64_t>& row_or_none(const M& m, std::string_view key) {
  auto it = m.find(std::string(key));
  return it == m.end() ? kNone : it->second;
}

std::uint64_t lookup2(const HeadingStats::Counts& c, std::string_view outer, std::string_view inner) {
  const auto& row = row_or_none(c, outer);
  auto it = row.find(std::string(inner));
  return it == row.end() ? 0 : it->second;
}

}  // namespace

HeadingStats::Counts HeadingStats::build_h2h(const Corpus& corpus) {
  Counts counts;
  for (const auto& [entity, rows] : corpus.index().by_entity) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        if (rows[i].table == rows[j].table) continue;
        const auto& ta = corpus.table(rows[i].table);
        const auto& tb = corpus.table(rows[j].table);
        const auto& ra = ta.rows[rows[i].row];
        const auto& rb = tb.rows[rows[j].row];
        for (std::size_t ca = 0; ca < ta.num_cols(); ++ca) {
          if (ca == ta.core_column || ra[ca].empty()) continue;
          for (std::size_t cb = 0; cb < tb.num_cols(); ++cb) {
            if (cb == tb.core_column || rb[cb].empty()) continue;
            if (!values_equal(*ra[ca].norm, *rb[cb].norm)) continue;
            const auto& ha = ta.headings[ca];
            const auto& hb = tb.headings[cb];
            ++counts[hb][ha];
            if (ha != hb) ++counts[ha][hb];
          }
        }
      }
    }
  }
  return counts;
}

HeadingStats::Counts HeadingStats::build_h2p(const Corpus& corpus, const KnowledgeBase& kb) {
  Counts counts;
  for (const auto& t : corpus.tables()) {
    for (const auto& row : t.rows) {
      const auto& e = row[t.core_column].entity;
      if (!e || !kb.has_entity(*e)) continue;
      const auto preds = kb.predicates_of(*e);
      for (std::size_t c = 0; c < t.num_cols(); ++c) {
        if (c == t.core_column || row[c].empty()) continue;
        const auto& v = *row[c].norm;
        for (const auto& p : preds) {
          const auto label = kb.label(p);
          for (const auto& obj : kb.lookup(*e, p)) {
            if (values_equal(normalize_kb_object(obj, label, v.type), v)) {
              ++counts[t.headings[c]][p];
              break;
            }
          }
        }
      }
    }
  }
  return counts;
}

HeadingStats HeadingStats::build(const Corpus& corpus, const KnowledgeBase& kb) {
  HeadingStats s;
  s.set_h2h(build_h2h(corpus));
  s.set_h2p(build_h2p(corpus, kb));
  return s;
}

std::map<std::string, std::uint64_t> HeadingStats::totals(const Counts& c) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& [h, row] : c) {
    std::uint64_t sum = 0;
    for (const auto& [k, n] : row) sum += n;
    out[h] = sum;
  }
  return out;
}

void HeadingStats::set_h2h(Counts c) {
  h2h_ = std::move(c);
  h2h_totals_ = totals(h2h_);
}

void HeadingStats::set_h2p(Counts c) {
  h2p_ = std::move(c);
  h2p_totals_ = totals(h2p_);
}

std::uint64_t HeadingStats::n_h2h(std::string_view h_prime, std::string_view h) const {
  return lookup2(h2h_, h, h_prime);
}

std::uint64_t HeadingStats::n_h2p(std::string_view h, std::string_view p) const { return lookup2(h2p_, h, p); }

double HeadingStats::p_h2h(std::string_view h_prime, std::string_view h) const {
  auto it = h2h_totals_.find(std::string(h));
  if (it == h2h_totals_.end() || it->second == 0) return 0.0;
  return static_cast<double>(n_h2h(h_prime, h)) / static_cast<double>(it->second);
}

double HeadingStats::p_p2h(std::string_view p, std::string_view h) const {
  auto it = h2p_totals_.find(std::string(h));
  if (it == h2p_totals_.end() || it->second == 0) return 0.0;
  return static_cast<double>(n_h2p(h, p)) / static_cast<double>(it->second);
}

const std::map<std::string, std::uint64_t>& HeadingStats::related_headings(std::string_view h) const {
  return row_or_none(h2h_, h);
}

const std::map<std::string, std::uint64_t>& HeadingStats::related_predicates(std::string_view h) const {
  return row_or_none(h2p_, h);
}

void HeadingStats::save_h2h(std::ostream& out) const {
  out << kH2hHeader << '\n';
  for (const auto& [h, row] : h2h_)
    for (const auto& [hp, n] : row) out << hp << '\t' << h << '\t' << n << '\n';
}

void HeadingStats::save_h2p(std::ostream& out) const {
  out << kH2pHeader << '\n';
  for (const auto& [h, row] : h2p_)
    for (const auto& [p, n] : row) out << h << '\t' << p << '\t' << n << '\n';
}

HeadingStats::Counts HeadingStats::load_counts(std::istream& in, std::string_view expected_header) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != expected_header)
    throw std::runtime_error("unexpected stats header (want \"" + std::string(expected_header) + "\")");
  const bool h2h = expected_header == kH2hHeader;
  Counts c;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto parts = split(line, '\t');
    std::uint64_t n = 0;
    if (parts.size() != 3 ||
        std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n).ec != std::errc{})
      throw std::runtime_error("malformed stats line " + std::to_string(lineno));
    // h2h lines are `h' h n` and stored under h; h2p lines are `h p n`.
    if (h2h)
      c[parts[1]][parts[0]] += n;
    else
      c[parts[0]][parts[1]] += n;
  }
  return c;
}

void HeadingStats::save(const std::filesystem::path& h2h_file, const std::filesystem::path& h2p_file) const {
  std::ofstream a(h2h_file);
  std::ofstream b(h2p_file);
  if (!a || !b) throw std::runtime_error("cannot write stats files");
  save_h2h(a);
  save_h2p(b);
}

HeadingStats HeadingStats::load(const std::filesystem::path& h2h_file, const std::filesystem::path& h2p_file) {
  std::ifstream a(h2h_file);
  if (!a) throw std::runtime_error("cannot read " + h2h_file.string());
  std::ifstream b(h2p_file);
  if (!b) throw std::runtime_error("cannot read " + h2p_file.string());
  HeadingStats s;
  s.set_h2h(load_counts(a, kH2hHeader));
  s.set_h2p(load_counts(b, kH2pHeader));
  return s;
}

}  // namespace cellac
