#include "cellac/table_match.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cellac/bipartite.hpp"
#include "cellac/corpus.hpp"
#include "cellac/edit_distance.hpp"

namespace cellac {

namespace {

double jaccard_sorted(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::size_t i = 0, j = 0, inter = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double relatedness(const std::string& e, const std::string& f, const Corpus& corpus) {
  if (e == f) return 1.0;
  return jaccard_sorted(corpus.tables_with_entity(e), corpus.tables_with_entity(f));
}

double directed_relatedness(const std::set<std::string>& from, const std::set<std::string>& to,
                            const Corpus& corpus) {
  if (from.empty() || to.empty()) return 0.0;
  double sum = 0;
  for (const auto& e : from) {
    double best = 0;
    for (const auto& f : to) {
      best = std::max(best, relatedness(e, f, corpus));
      if (best >= 1.0) break;
    }
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

double directed_data_sim(const TableProfile& a, const TableProfile& b) {
  if (a.column_bins.empty()) return 0.0;
  double sum = 0;
  for (const auto& ca : a.column_bins) {
    double best = 0;
    for (const auto& cb : b.column_bins) best = std::max(best, cosine(ca, cb));
    sum += best;
  }
  return sum / static_cast<double>(a.column_bins.size());
}

TermVector idf_weighted(const TermVector& tv, const Corpus& corpus) {
  TermVector out;
  const double n = static_cast<double>(corpus.size());
  for (const auto& [term, tf] : tv) {
    const double df = std::max<double>(1.0, corpus.doc_freq(term));
    out[term] = tf * std::log(1.0 + n / df);
  }
  return out;
}

}  // namespace

TableProfile make_profile(const RelationalTable& t) {
  TableProfile p;
  p.core_column = t.core_column;
  p.title = term_vector(t.page_title);
  p.heading_labels = t.headings;
  p.columns.resize(t.num_cols());
  for (std::size_t c = 0; c < t.num_cols(); ++c) {
    add_terms(p.headings, t.headings[c]);
    p.heading_terms.push_back(term_vector(t.headings[c]));
  }
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c].empty()) continue;
      add_terms(p.data, row[c].text);
      add_terms(p.columns[c], row[c].text);
    }
    if (const auto& e = row[t.core_column].entity) p.entities.insert(*e);
  }
  for (const auto& col : p.columns) p.column_bins.push_back(binarize(col));
  return p;
}

std::array<double, 4> infogather_sims(const TableProfile& t, const TableProfile& c, ColumnAlignment aligned) {
  std::size_t ct = t.core_column, cc = c.core_column;
  if (aligned) std::tie(ct, cc) = *aligned;
  double col = 0.0;
  if (ct < t.columns.size() && cc < c.columns.size()) col = cosine(t.columns[ct], c.columns[cc]);
  return {cosine(t.data, c.data), col, cosine(t.title, c.title), cosine(t.headings, c.headings)};
}

double infogather_score(const TableProfile& t, const TableProfile& c, const InfoGatherWeights& w,
                        ColumnAlignment aligned) {
  const auto s = infogather_sims(t, c, aligned);
  double score = 0;
  for (std::size_t i = 0; i < 4; ++i) score += w[i] * s[i];
  return score;
}

double infogather_score(const RelationalTable& t, const RelationalTable& c, const InfoGatherWeights& w,
                        ColumnAlignment aligned) {
  return infogather_score(make_profile(t), make_profile(c), w, aligned);
}

double msje_heading_score(const std::vector<std::string>& a, const std::vector<std::string>& b, double threshold) {
  const std::size_t denom = std::max(a.size(), b.size());
  if (denom == 0) return 0.0;
  std::vector<std::vector<double>> w(a.size(), std::vector<double>(b.size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double s = edit_sim(a[i], b[j]);
      if (s >= threshold) w[i][j] = s;
    }
  return max_weight_matching(w).total / static_cast<double>(denom);
}

double related_heading_sim(const TableProfile& t, const TableProfile& c) {
  const std::size_t denom = std::min(t.heading_terms.size(), c.heading_terms.size());
  if (denom == 0) return 0.0;
  std::vector<std::vector<double>> w(t.heading_terms.size(), std::vector<double>(c.heading_terms.size()));
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w[i].size(); ++j) w[i][j] = cosine(t.heading_terms[i], c.heading_terms[j]);
  return std::min(1.0, max_weight_matching(w).total / static_cast<double>(denom));
}

double related_data_sim(const TableProfile& t, const TableProfile& c) {
  return (directed_data_sim(t, c) + directed_data_sim(c, t)) / 2.0;
}

ComplementScores complement_scores(const TableProfile& t, const TableProfile& c, const Corpus& corpus) {
  ComplementScores s;
  if (!c.heading_labels.empty()) {
    std::set<std::string> mine(t.heading_labels.begin(), t.heading_labels.end());
    std::size_t extra = 0;
    for (const auto& h : c.heading_labels)
      if (!mine.count(h)) ++extra;
    s.schema_benefit = static_cast<double>(extra) / static_cast<double>(c.heading_labels.size());
  }
  std::size_t inter = 0;
  for (const auto& e : t.entities) inter += c.entities.count(e);
  const std::size_t uni = t.entities.size() + c.entities.size() - inter;
  s.entity_overlap = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  s.entity_relatedness =
      (directed_relatedness(t.entities, c.entities, corpus) + directed_relatedness(c.entities, t.entities, corpus)) /
      2.0;
  return s;
}

double idf_sum(std::string_view text, const Corpus& corpus) {
  if (corpus.size() == 0) return 0.0;
  std::set<std::string> terms;
  for (auto& w : tokenize(text)) terms.insert(w);
  const double n = static_cast<double>(corpus.size());
  double sum = 0;
  for (const auto& w : terms) sum += std::log(n / std::max<double>(1.0, corpus.doc_freq(w)));
  return std::max(0.0, sum);
}

std::array<double, 10> quality_features(const RelationalTable& t, const Corpus& corpus) {
  const auto& m = t.meta;
  return {static_cast<double>(t.num_rows()),
          static_cast<double>(t.num_cols()),
          static_cast<double>(t.empty_cells()),
          idf_sum(t.caption, corpus),
          idf_sum(t.page_title, corpus),
          static_cast<double>(m.in_links),
          static_cast<double>(m.out_links),
          static_cast<double>(m.page_views),
          1.0 / static_cast<double>(std::max<std::uint64_t>(1, m.tables_on_page)),
          m.page_chars == 0 ? 0.0 : static_cast<double>(m.table_chars) / static_cast<double>(m.page_chars)};
}

const std::array<std::string, 10>& quality_feature_names() {
  static const std::array<std::string, 10> names = {"ROWS",     "COLS",      "EMPTY_CELLS", "CAPTION_IDF",
                                                    "TITLE_IDF", "IN_LINKS",  "OUT_LINKS",   "PAGE_VIEWS",
                                                    "INV_TABLES_ON_PAGE", "TABLE_PAGE_RATIO"};
  return names;
}

const std::vector<std::string>& tmatch_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& q : quality_feature_names()) n.push_back("IN_" + q);
    for (const auto& q : quality_feature_names()) n.push_back("CAND_" + q);
    for (const char* f : {"IG_TITLE_IDF_SIM", "IG_HEADING_SIM", "IG_COLUMN_SIM", "IG_DATA_SIM", "MSJE_HEADING",
                          "REL_HEADING_SIM", "REL_DATA_SIM", "SCHEMA_BENEFIT", "ENTITY_OVERLAP",
                          "ENTITY_RELATEDNESS"})
      n.emplace_back(f);
    return n;
  }();
  return names;
}

std::vector<double> extract_match_features(const RelationalTable& t, const TableProfile& tp,
                                           const RelationalTable& c, const TableProfile& cp, const Corpus& corpus,
                                           const TableMatchConfig& config, ColumnAlignment aligned) {
  std::vector<double> f;
  f.reserve(30);
  for (double v : quality_features(t, corpus)) f.push_back(v);
  for (double v : quality_features(c, corpus)) f.push_back(v);
  const auto ig = infogather_sims(tp, cp, aligned);
  f.push_back(cosine(idf_weighted(tp.title, corpus), idf_weighted(cp.title, corpus)));
  f.push_back(ig[3]);
  f.push_back(ig[1]);
  f.push_back(ig[0]);
  f.push_back(msje_heading_score(tp.heading_labels, cp.heading_labels, config.msje_threshold));
  f.push_back(related_heading_sim(tp, cp));
  f.push_back(related_data_sim(tp, cp));
  const auto comp = complement_scores(tp, cp, corpus);
  f.push_back(comp.schema_benefit);
  f.push_back(comp.entity_overlap);
  f.push_back(comp.entity_relatedness);
  return f;
}

std::vector<GradedPair> read_graded_pairs(std::istream& in) {
  std::vector<GradedPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto parts = split(line, '\t');
    int grade = -1;
    if (parts.size() != 3 ||
        std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), grade).ec != std::errc{} || grade < 0 ||
        grade > 2)
      throw std::runtime_error("malformed training pair on line " + std::to_string(lineno));
    out.push_back({parts[0], parts[1], grade});
  }
  return out;
}

std::vector<GradedPair> read_graded_pairs(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return read_graded_pairs(in);
}

void write_graded_pairs(std::ostream& out, const std::vector<GradedPair>& pairs) {
  for (const auto& p : pairs) out << p.input_id << '\t' << p.candidate_id << '\t' << p.grade << '\n';
}

Forest train_tmatch(const std::vector<GradedPair>& pairs, const Corpus& corpus, const ForestParams& params,
                    const TableMatchConfig& config, const std::vector<RelationalTable>& tables) {
  auto resolve = [&](const std::string& id) -> const RelationalTable& {
    for (const auto& t : tables)
      if (t.id == id) return t;
    if (auto i = corpus.find(id)) return corpus.table(*i);
    throw std::invalid_argument("training pair references unknown table " + id);
  };
  std::map<std::string, TableProfile> profiles;
  auto profile = [&](const RelationalTable& t) -> const TableProfile& {
    auto it = profiles.find(t.id);
    if (it == profiles.end()) it = profiles.emplace(t.id, make_profile(t)).first;
    return it->second;
  };
  std::vector<TrainingSample> samples;
  samples.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto& a = resolve(p.input_id);
    const auto& b = resolve(p.candidate_id);
    samples.push_back({extract_match_features(a, profile(a), b, profile(b), corpus, config), p.grade / 2.0});
  }
  return Forest::fit(tmatch_feature_names(), std::move(samples), params);
}

double tmatch_score(const Forest& model, const RelationalTable& t, const TableProfile& tp, const RelationalTable& c,
                    const TableProfile& cp, const Corpus& corpus, const TableMatchConfig& config,
                    ColumnAlignment aligned) {
  const auto f = extract_match_features(t, tp, c, cp, corpus, config, aligned);
  return std::max(0.0, model.predict(std::span<const double>(f)));
}

}  // namespace cellac
