#include "cellac/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "cellac/heading_stats.hpp"
#include "cellac/kb.hpp"

namespace cellac {

const MethodResult& BenchmarkResult::method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return m;
  throw std::out_of_range("no method " + name);
}

double BenchmarkResult::best_single_source(bool empty_included) const {
  double best = 0.0;
  for (const auto& m : methods) {
    if (m.name.rfind("KB ", 0) != 0 && m.name.rfind("TC ", 0) != 0) continue;
    best = std::max(best, empty_included ? m.report.included.ndcg10 : m.report.excluded.ndcg10);
  }
  return best;
}

double BenchmarkResult::empty_cell_ndcg10(const std::string& name) const {
  const auto& m = method(name);
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [cell, truth] : qrels) {
    if (truth.size() != 1 || *truth.begin() != kEmptyValue) continue;
    sum += m.report.per_cell_included.at(cell).second;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

Qrels qrels_from_truths(const std::map<std::string, Truth>& truths) {
  Qrels q;
  for (const auto& [cell, t] : truths) {
    auto& s = q[cell];
    if (t.empty) s.insert(kEmptyValue);
    for (const auto& v : t.values) s.insert(v.render());
  }
  return q;
}

std::vector<std::string> to_canonical(const std::vector<RankedSuggestion>& ranking) {
  std::vector<std::string> out;
  out.reserve(ranking.size());
  for (const auto& r : ranking) out.push_back(r.candidate.canonical());
  return out;
}

BenchmarkResult run_benchmark(const TestCollection& tc, const KnowledgeBase& kb,
                              const std::map<std::string, Truth>& truths, const std::vector<GradedPair>& tmatch_pairs,
                              const BenchmarkConfig& config) {
  BenchmarkResult result;
  for (const auto& c : tc.cells)
    if (!truths.count(c.cell_id)) throw std::invalid_argument("no truth for test cell " + c.cell_id);
  result.qrels = qrels_from_truths(truths);
  result.stats = collection_stats(result.qrels);

  const Corpus& corpus = tc.corpus;
  const HeadingStats stats = HeadingStats::build(corpus, kb);
  std::optional<LabelEmbeddings> emb;
  try {
    auto p = config.embeddings;
    p.seed = config.seed;
    emb = LabelEmbeddings::train(corpus, p);
  } catch (const std::invalid_argument&) {
  }
  std::vector<GradedPair> pairs;
  for (const auto& p : tmatch_pairs)
    if (corpus.find(p.input_id) && corpus.find(p.candidate_id)) pairs.push_back(p);
  std::optional<Forest> tmatch;
  if (!pairs.empty()) {
    auto p = config.tmatch;
    p.seed = config.seed;
    tmatch = train_tmatch(pairs, corpus, p, config.table_match);
  }
  const RankContext ctx(corpus, kb, stats, emb ? &*emb : nullptr, tmatch ? &*tmatch : nullptr, config.table_match,
                        config.candidates);

  const std::size_t n = tc.cells.size();
  std::vector<RelationalTable> inputs;
  inputs.reserve(n);
  std::vector<CellScorer> scorers;
  scorers.reserve(n);
  for (const auto& c : tc.cells) {
    inputs.push_back(conceal(tc.input_table(c), c));
    scorers.emplace_back(ctx, make_target(inputs.back(), c.row, c.col));
  }

  auto add_method = [&](const std::string& name, const std::vector<std::vector<RankedSuggestion>>& rankings) {
    MethodResult m;
    m.name = name;
    for (std::size_t i = 0; i < n; ++i) m.run[tc.cells[i].cell_id] = to_canonical(rankings[i]);
    m.report = evaluate(m.run, result.qrels);
    result.methods.push_back(std::move(m));
  };

  // KB-only with gamma tuned on the training folds.
  const auto fold = fold_assignment(n, config.folds, config.seed);
  std::vector<double> grid;
  for (double g = 0.0; g <= 1.0 + 1e-9; g += config.gamma_step) grid.push_back(std::min(1.0, g));
  for (KbVariant v : {KbVariant::ED, KbVariant::MP}) {
    std::vector<std::vector<std::vector<RankedSuggestion>>> by_gamma(grid.size());
    std::vector<std::vector<double>> score(grid.size(), std::vector<double>(n));
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (std::size_t i = 0; i < n; ++i) {
        by_gamma[g].push_back(kb_rank(scorers[i], v, grid[g]));
        score[g][i] = ndcg_at_k(to_canonical(by_gamma[g].back()), result.qrels.at(tc.cells[i].cell_id), 10);
      }
    }
    std::vector<std::vector<RankedSuggestion>> chosen(n);
    double gamma_sum = 0;
    std::size_t gamma_folds = 0;
    for (std::size_t k = 0; k < config.folds; ++k) {
      std::size_t best = 0;
      double best_score = -1;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
          if (fold[i] != k) s += score[g][i];
        if (s > best_score + 1e-12) {
          best_score = s;
          best = g;
        }
      }
      bool any = false;
      for (std::size_t i = 0; i < n; ++i)
        if (fold[i] == k) {
          chosen[i] = by_gamma[best][i];
          any = true;
        }
      if (any) {
        gamma_sum += grid[best];
        ++gamma_folds;
      }
    }
    const double mean_gamma = gamma_folds ? gamma_sum / static_cast<double>(gamma_folds) : 0.0;
    (v == KbVariant::ED ? result.gamma_ed : result.gamma_mp) = mean_gamma;
    add_method("KB " + to_string(v), chosen);
  }

  if (config.tc_grid) {
    std::vector<Matcher> matchers{Matcher::InfoGather};
    if (tmatch) matchers.push_back(Matcher::TMatch);
    for (Matcher m : matchers)
      for (Combine c : {Combine::Top, Combine::All})
        for (HeadSim s : {HeadSim::UNI, HeadSim::ED, HeadSim::MP, HeadSim::L2V}) {
          std::vector<std::vector<RankedSuggestion>> r;
          for (auto& sc : scorers) r.push_back(tc_rank(sc, m, c, s));
          add_method("TC " + to_string(m) + " " + to_string(c) + " " + to_string(s), r);
        }
  }

  {
    std::vector<std::vector<RankedSuggestion>> r;
    for (auto& sc : scorers) r.push_back(otg_rank(sc));
    add_method(kMethodOtg, r);
  }

  std::vector<CellFeatures> features;
  features.reserve(n);
  for (std::size_t i = 0; i < n; ++i) features.push_back(extract_cell_features(scorers[i], truths.at(tc.cells[i].cell_id)));
  auto ltr = config.ltr;
  ltr.seed = config.seed;
  const std::vector<std::pair<const char*, FeatureSet>> sets = {
      {kMethodLtrI, {false, false}}, {kMethodLtrII, {true, false}}, {kMethodLtrIII, {true, true}}};
  for (const auto& [name, set] : sets) add_method(name, cross_validate_ltr(features, set, ltr, config.folds, config.seed));

  std::vector<const CellFeatures*> all;
  for (const auto& f : features) all.push_back(&f);
  if (!all.empty()) result.importance = train_ltr(all, {true, true}, ltr).named_importance();
  return result;
}

std::map<std::string, Truth> truths_from_originals(const TestCollection& tc) {
  std::map<std::string, Truth> out;
  for (const auto& cell : tc.cells) {
    const auto& c = tc.input_table(cell).rows[cell.row][cell.col];
    Truth t;
    if (c.empty())
      t.empty = true;
    else
      t.values.push_back(*c.norm);
    out[cell.cell_id] = std::move(t);
  }
  return out;
}

BenchmarkResult run_synthetic_benchmark(const SyntheticParams& params, std::size_t per_type,
                                        std::size_t cells_per_column, BenchmarkConfig config) {
  const auto world = generate_world(params);
  const auto tc = build_test_collection(world.corpus(), per_type, cells_per_column, params.seed);
  std::map<std::string, Truth> truths;
  for (const auto& c : tc.cells) truths[c.cell_id] = world.truth_for(c);
  config.seed = params.seed;
  return run_benchmark(tc, world.kb, truths, world.tmatch_pairs, config);
}

}  // namespace cellac
