#include "cellac/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "cellac/corpus.hpp"
#include "cellac/edit_distance.hpp"
#include "cellac/embeddings.hpp"
#include "cellac/heading_stats.hpp"
#include "cellac/kb.hpp"
#include "cellac/text.hpp"

namespace cellac {

namespace {

constexpr std::size_t kGroup1 = 6;
constexpr std::size_t kQuality = 20;
constexpr std::size_t kGroup2 = 12;
constexpr std::size_t kGroup3 = 22;

struct Aggregate {
  double max = 0, sum = 0;
  std::size_t n = 0;
  void add(double v) {
    max = n == 0 ? v : std::max(max, v);
    sum += v;
    ++n;
  }
  double avg() const { return n == 0 ? 0.0 : sum / static_cast<double>(n); }
};

}  // namespace

RankContext::RankContext(const Corpus& corpus, const KnowledgeBase& kb, const HeadingStats& stats,
                         const LabelEmbeddings* embeddings, const Forest* tmatch, TableMatchConfig table_match,
                         CandidateConfig candidates)
    : corpus_(&corpus), kb_(&kb), stats_(&stats), embeddings_(embeddings), tmatch_(tmatch),
      table_match_(table_match), candidates_(candidates) {
  profiles_.reserve(corpus.size());
  for (const auto& t : corpus.tables()) profiles_.push_back(make_profile(t));
}

const std::vector<std::string>& value_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n = {"IS_TC", "IS_KB", "EDITDIST_PH", "MAPPINGPROB_PH", "EDITDIST_HH", "MAPPINGPROB_HH"};
    for (const auto& q : quality_feature_names()) n.push_back("IN_" + q);
    for (const auto& q : quality_feature_names()) n.push_back("SUPPORT_AVG_" + q);
    for (const char* f : {"NUM_E", "NUM_H", "NUM_EH", "EMPTY_RATE", "MATCH_PH_NUM", "MATCH_HH_NUM", "MATCH_PH_MAX",
                          "MATCH_PH_AVG", "MATCH_PH_SUM", "MATCH_HH_MAX", "MATCH_HH_AVG", "MATCH_HH_SUM"})
      n.emplace_back(f);
    for (const char* f : {"TMATCH_NUM", "TMATCH_MAX", "TMATCH_AVG", "TMATCH_SUM"}) n.emplace_back(f);
    for (const char* m : {"IG", "TMATCH"})
      for (const char* s : {"ED", "MP", "L2V"})
        for (const char* a : {"MAX", "AVG", "SUM"})
          n.push_back(std::string("SCORE_") + m + "_" + s + "_" + a);
    return n;
  }();
  return names;
}

std::vector<std::size_t> feature_columns(FeatureSet set) {
  std::vector<std::size_t> cols(kGroup1 + kQuality);
  std::iota(cols.begin(), cols.end(), 0);
  const std::size_t g2 = kGroup1 + kQuality;
  const std::size_t g3 = g2 + kGroup2;
  if (set.group2)
    for (std::size_t i = g2; i < g3; ++i) cols.push_back(i);
  if (set.group3)
    for (std::size_t i = g3; i < g3 + kGroup3; ++i) cols.push_back(i);
  return cols;
}

std::vector<std::string> value_feature_names(FeatureSet set) {
  std::vector<std::string> out;
  for (auto i : feature_columns(set)) out.push_back(value_feature_names()[i]);
  return out;
}

FeatureSet feature_set_of(const Forest& model) {
  for (bool g2 : {false, true})
    for (bool g3 : {false, true}) {
      FeatureSet s{g2, g3};
      if (value_feature_names(s) == model.names()) return s;
    }
  throw std::invalid_argument("model schema is not a value-ranking schema");
}

CellScorer::CellScorer(const RankContext& ctx, Target target) : ctx_(&ctx), target_(std::move(target)) {
  if (!target_.table) throw std::invalid_argument("target has no input table");
  pool_ = find_candidates(target_, ctx.corpus(), ctx.kb(), ctx.stats(), ctx.candidates());
  input_profile_ = make_profile(*target_.table);
  const auto q = quality_features(*target_.table, ctx.corpus());
  input_quality_.assign(q.begin(), q.end());
}

double CellScorer::table_score(Matcher m, std::uint32_t table, std::uint32_t col) {
  const auto key = std::make_tuple(static_cast<int>(m), table, col);
  if (auto it = table_scores_.find(key); it != table_scores_.end()) return it->second;
  ColumnAlignment aligned;
  if (target_.column) aligned = std::make_pair(*target_.column, static_cast<std::size_t>(col));
  double s = 0.0;
  if (m == Matcher::InfoGather) {
    s = infogather_score(input_profile_, ctx_->profile(table), ctx_->table_match().ig_weights, aligned);
  } else {
    if (!ctx_->tmatch()) throw std::runtime_error("table matching model not loaded (run train-tmatch)");
    s = tmatch_score(*ctx_->tmatch(), *target_.table, input_profile_, ctx_->corpus().table(table),
                     ctx_->profile(table), ctx_->corpus(), ctx_->table_match(), aligned);
  }
  table_scores_.emplace(key, s);
  return s;
}

double CellScorer::head_sim(HeadSim s, const std::string& h_prime) const {
  switch (s) {
    case HeadSim::UNI:
      return 1.0;
    case HeadSim::ED:
      return edit_sim(h_prime, target_.heading);
    case HeadSim::MP:
      return ctx_->stats().p_h2h(h_prime, target_.heading);
    case HeadSim::L2V:
      return ctx_->embeddings() ? l2v_sim(h_prime, target_.heading, *ctx_->embeddings()) : 0.0;
  }
  return 0.0;
}

double CellScorer::tc_score(const Candidate& c, Matcher m, Combine comb, HeadSim s) {
  std::map<std::uint32_t, double> per_table;
  for (const auto& e : c.tc) {
    const double v = table_score(m, e.table, e.col) * head_sim(s, e.heading);
    auto [it, fresh] = per_table.emplace(e.table, v);
    if (!fresh) it->second = std::max(it->second, v);
  }
  double out = 0.0;
  for (const auto& [t, v] : per_table) out = comb == Combine::Top ? std::max(out, v) : out + v;
  return out;
}

double CellScorer::kb_score(const Candidate& c, KbVariant v) const {
  double best = 0.0;
  for (const auto& e : c.kb) {
    const double s =
        v == KbVariant::ED ? edit_sim(e.label, target_.heading) : ctx_->stats().p_p2h(e.predicate, target_.heading);
    best = std::max(best, s);
  }
  return best;
}

std::vector<double> CellScorer::features(const Candidate& c) {
  std::vector<double> f;
  f.reserve(kGroup1 + kQuality + kGroup2 + kGroup3);
  const auto& h = target_.heading;
  const auto& stats = ctx_->stats();
  const auto& corpus = ctx_->corpus();

  // Group I
  f.push_back(c.tc.empty() ? 0.0 : 1.0);
  f.push_back(c.kb.empty() ? 0.0 : 1.0);
  f.push_back(kb_score(c, KbVariant::ED));
  f.push_back(kb_score(c, KbVariant::MP));
  double ed_hh = 0, mp_hh = 0;
  for (const auto& e : c.tc) {
    ed_hh = std::max(ed_hh, head_sim(HeadSim::ED, e.heading));
    mp_hh = std::max(mp_hh, head_sim(HeadSim::MP, e.heading));
  }
  f.push_back(ed_hh);
  f.push_back(mp_hh);

  // Table quality: input table, then the mean over supporting tables.
  for (double q : input_quality_) f.push_back(q);
  std::set<std::uint32_t> tables;
  for (const auto& e : c.tc) tables.insert(e.table);
  std::vector<double> support(10, 0.0);
  for (auto t : tables) {
    const auto q = quality_features(corpus.table(t), corpus);
    for (std::size_t i = 0; i < 10; ++i) support[i] += q[i] / static_cast<double>(tables.size());
  }
  for (double q : support) f.push_back(q);

  // Group II (cell context; identical for every candidate of the cell).
  // NUM_EH counts filled (e,h) cells outside the input table.
  f.push_back(static_cast<double>(corpus.rows_of(target_.entity).size()));
  f.push_back(static_cast<double>(corpus.columns_of(h).size()));
  std::size_t filled = 0;
  for (const auto& ref : corpus.cells_of(target_.entity, h)) {
    const auto& t = corpus.table(ref.table);
    if (!t.rows[ref.row][ref.col].empty() && t.id != target_.table->id) ++filled;
  }
  f.push_back(static_cast<double>(filled));
  f.push_back(corpus.empty_rate(h));
  Aggregate ph, hh;
  for (const auto& [p, n] : stats.related_predicates(h))
    if (n > 0) ph.add(static_cast<double>(n));
  for (const auto& [hp, n] : stats.related_headings(h))
    if (n > 0) hh.add(static_cast<double>(n));
  f.push_back(static_cast<double>(ph.n));
  f.push_back(static_cast<double>(hh.n));
  f.push_back(ph.max);
  f.push_back(ph.avg());
  f.push_back(ph.sum);
  f.push_back(hh.max);
  f.push_back(hh.avg());
  f.push_back(hh.sum);

  // Group III
  const bool have_tmatch = ctx_->tmatch() != nullptr;
  std::map<std::uint32_t, std::vector<const TcEvidence*>> by_table;
  for (const auto& e : c.tc) by_table[e.table].push_back(&e);
  Aggregate tm;
  std::size_t tm_positive = 0;
  if (have_tmatch) {
    for (const auto& [t, evs] : by_table) {
      double best = 0;
      for (const auto* e : evs) best = std::max(best, table_score(Matcher::TMatch, t, e->col));
      tm.add(best);
      if (best > 0) ++tm_positive;
    }
  }
  f.push_back(static_cast<double>(tm_positive));
  f.push_back(tm.max);
  f.push_back(tm.avg());
  f.push_back(tm.sum);
  for (Matcher m : {Matcher::InfoGather, Matcher::TMatch}) {
    for (HeadSim s : {HeadSim::ED, HeadSim::MP, HeadSim::L2V}) {
      Aggregate a;
      if (m == Matcher::InfoGather || have_tmatch) {
        for (const auto& [t, evs] : by_table) {
          double best = 0;
          for (const auto* e : evs) best = std::max(best, table_score(m, t, e->col) * head_sim(s, e->heading));
          a.add(best);
        }
      }
      f.push_back(a.max);
      f.push_back(a.avg());
      f.push_back(a.sum);
    }
  }
  for (auto& v : f)
    if (!std::isfinite(v)) v = 0.0;
  return f;
}

std::vector<RankedSuggestion> finalize_ranking(std::vector<std::pair<Candidate, double>> scored) {
  std::vector<RankedSuggestion> out;
  out.reserve(scored.size());
  for (auto& [c, s] : scored) out.push_back({std::move(c), s, 0});
  std::vector<std::string> canon;
  canon.reserve(out.size());
  for (const auto& r : out) canon.push_back(r.candidate.canonical());
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out[a].score != out[b].score) return out[a].score > out[b].score;
    return canon[a] < canon[b];
  });
  std::vector<RankedSuggestion> sorted;
  sorted.reserve(out.size());
  for (auto i : order) sorted.push_back(std::move(out[i]));
  for (std::size_t i = 0; i < sorted.size(); ++i) sorted[i].rank = i + 1;
  return sorted;
}

std::vector<RankedSuggestion> kb_rank(CellScorer& cell, KbVariant variant, double gamma) {
  std::vector<std::pair<Candidate, double>> scored;
  for (const auto& c : cell.pool()) {
    if (c.is_empty)
      scored.emplace_back(c, gamma);
    else if (!c.kb.empty())
      scored.emplace_back(c, cell.kb_score(c, variant));
  }
  return finalize_ranking(std::move(scored));
}

std::vector<RankedSuggestion> tc_rank(CellScorer& cell, Matcher m, Combine comb, HeadSim s) {
  std::vector<std::pair<Candidate, double>> scored;
  for (const auto& c : cell.pool()) {
    if (c.is_empty)
      scored.emplace_back(c, 0.0);
    else if (!c.tc.empty())
      scored.emplace_back(c, cell.tc_score(c, m, comb, s));
  }
  return finalize_ranking(std::move(scored));
}

std::vector<RankedSuggestion> otg_rank(CellScorer& cell) {
  const Matcher m = cell.context().tmatch() ? Matcher::TMatch : Matcher::InfoGather;
  std::vector<std::pair<Candidate, double>> kb_part, tc_part;
  const Candidate* empty = nullptr;
  for (const auto& c : cell.pool()) {
    if (c.is_empty)
      empty = &c;
    else if (!c.kb.empty())
      kb_part.emplace_back(c, cell.kb_score(c, KbVariant::ED));
    else
      tc_part.emplace_back(c, cell.tc_score(c, m, Combine::Top, HeadSim::ED));
  }
  auto kb_sorted = finalize_ranking(std::move(kb_part));
  auto tc_sorted = finalize_ranking(std::move(tc_part));
  std::vector<RankedSuggestion> out;
  const double n = static_cast<double>(cell.pool().size());
  for (auto& r : kb_sorted) out.push_back(std::move(r));
  for (auto& r : tc_sorted) out.push_back(std::move(r));
  if (empty) out.push_back({*empty, 0.0, 0});
  // Scores encode the preference order only.
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].rank = i + 1;
    out[i].score = n - static_cast<double>(i);
  }
  return out;
}

std::vector<RankedSuggestion> ltr_rank(CellScorer& cell, const Forest& model) {
  const auto cols = feature_columns(feature_set_of(model));
  std::vector<std::pair<Candidate, double>> scored;
  std::vector<double> x(cols.size());
  for (const auto& c : cell.pool()) {
    const auto full = cell.features(c);
    for (std::size_t i = 0; i < cols.size(); ++i) x[i] = full[cols[i]];
    scored.emplace_back(c, model.predict(std::span<const double>(x)));
  }
  return finalize_ranking(std::move(scored));
}

bool is_correct(const Candidate& c, const Truth& truth) {
  if (c.is_empty) return truth.empty;
  return std::any_of(truth.values.begin(), truth.values.end(),
                     [&](const NormalizedValue& v) { return values_equal(v, c.value); });
}

CellFeatures extract_cell_features(CellScorer& cell, const Truth& truth) {
  CellFeatures out;
  out.pool = cell.pool();
  for (const auto& c : out.pool) {
    out.features.push_back(cell.features(c));
    out.labels.push_back(is_correct(c, truth) ? 1 : 0);
  }
  return out;
}

Forest train_ltr(const std::vector<const CellFeatures*>& cells, FeatureSet set, const ForestParams& params) {
  const auto cols = feature_columns(set);
  std::vector<TrainingSample> samples;
  for (const auto* cell : cells) {
    for (std::size_t i = 0; i < cell->pool.size(); ++i) {
      TrainingSample s;
      s.x.reserve(cols.size());
      for (auto c : cols) s.x.push_back(cell->features[i][c]);
      s.y = cell->labels[i];
      samples.push_back(std::move(s));
    }
  }
  return Forest::fit(value_feature_names(set), std::move(samples), params);
}

std::vector<RankedSuggestion> rank_precomputed(const CellFeatures& cell, const Forest& model) {
  const auto cols = feature_columns(feature_set_of(model));
  std::vector<std::pair<Candidate, double>> scored;
  std::vector<double> x(cols.size());
  for (std::size_t i = 0; i < cell.pool.size(); ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) x[k] = cell.features[i][cols[k]];
    scored.emplace_back(cell.pool[i], model.predict(std::span<const double>(x)));
  }
  return finalize_ranking(std::move(scored));
}

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds == 0) throw std::invalid_argument("folds must be positive");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> fold(n);
  for (std::size_t i = 0; i < n; ++i) fold[order[i]] = i % folds;
  return fold;
}

std::vector<std::vector<RankedSuggestion>> cross_validate_ltr(const std::vector<CellFeatures>& cells, FeatureSet set,
                                                               const ForestParams& params, std::size_t folds,
                                                               std::uint64_t seed) {
  const auto fold = fold_assignment(cells.size(), folds, seed);
  std::vector<std::vector<RankedSuggestion>> out(cells.size());
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<const CellFeatures*> train;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (fold[i] != k) train.push_back(&cells[i]);
    bool any_test = false;
    for (std::size_t i = 0; i < cells.size(); ++i) any_test = any_test || fold[i] == k;
    if (!any_test || train.empty()) continue;
    const auto model = train_ltr(train, set, params);
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (fold[i] == k) out[i] = rank_precomputed(cells[i], model);
  }
  return out;
}

std::string provenance_summary(const Candidate& c) {
  std::vector<std::string> tokens;
  for (const auto& e : c.tc) tokens.push_back("tc:" + e.table_id + ":" + e.heading);
  for (const auto& e : c.kb) tokens.push_back("kb:" + e.predicate);
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ';';
    out += t;
  }
  return out.empty() ? "-" : out;
}

void write_run(std::ostream& out, const std::string& cell_id, const std::vector<RankedSuggestion>& ranking) {
  for (const auto& r : ranking)
    out << cell_id << '\t' << r.rank << '\t' << r.candidate.canonical() << '\t' << format_number(r.score) << '\t'
        << provenance_summary(r.candidate) << '\n';
}

std::string to_string(KbVariant v) { return v == KbVariant::ED ? "ED" : "MP"; }
std::string to_string(Matcher m) { return m == Matcher::InfoGather ? "InfoGather" : "TMatch"; }
std::string to_string(Combine c) { return c == Combine::Top ? "top" : "all"; }
std::string to_string(HeadSim s) {
  switch (s) {
    case HeadSim::UNI:
      return "UNI";
    case HeadSim::ED:
      return "ED";
    case HeadSim::MP:
      return "MP";
    case HeadSim::L2V:
      return "L2V";
  }
  return "?";
}

}  // namespace cellac
