#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cellac/candidates.hpp"
#include "cellac/forest.hpp"
#include "cellac/table_match.hpp"

namespace cellac {

class Corpus;
class KnowledgeBase;
class HeadingStats;
class LabelEmbeddings;

enum class KbVariant { ED, MP };
enum class Matcher { InfoGather, TMatch };
enum class Combine { Top, All };
enum class HeadSim { UNI, ED, MP, L2V };

/// Read-only sources shared by all cells. Profiles of corpus tables are
/// computed once at construction.
class RankContext {
 public:
  RankContext(const Corpus& corpus, const KnowledgeBase& kb, const HeadingStats& stats,
              const LabelEmbeddings* embeddings = nullptr, const Forest* tmatch = nullptr,
              TableMatchConfig table_match = {}, CandidateConfig candidates = {});

  const Corpus& corpus() const { return *corpus_; }
  const KnowledgeBase& kb() const { return *kb_; }
  const HeadingStats& stats() const { return *stats_; }
  const LabelEmbeddings* embeddings() const { return embeddings_; }
  const Forest* tmatch() const { return tmatch_; }
  const TableMatchConfig& table_match() const { return table_match_; }
  const CandidateConfig& candidates() const { return candidates_; }
  const TableProfile& profile(std::size_t table) const { return profiles_.at(table); }

 private:
  const Corpus* corpus_;
  const KnowledgeBase* kb_;
  const HeadingStats* stats_;
  const LabelEmbeddings* embeddings_;
  const Forest* tmatch_;
  TableMatchConfig table_match_;
  CandidateConfig candidates_;
  std::vector<TableProfile> profiles_;
};

/// Which optional feature groups are present; group I and the table
/// quality features are always on.
struct FeatureSet {
  bool group2 = true;
  bool group3 = true;
  bool operator==(const FeatureSet&) const = default;
};

/// Full schema (all groups), in extraction order.
const std::vector<std::string>& value_feature_names();
std::vector<std::string> value_feature_names(FeatureSet set);
/// Indices into the full schema selected by `set`.
std::vector<std::size_t> feature_columns(FeatureSet set);
/// Recovers the feature set from a trained model's schema.
FeatureSet feature_set_of(const Forest& model);

/// Candidate pool and cached table scores for one target cell.
class CellScorer {
 public:
  /// Throws std::invalid_argument if the target has no input table.
  CellScorer(const RankContext& ctx, Target target);

  const Target& target() const { return target_; }
  const std::vector<Candidate>& pool() const { return pool_; }
  const RankContext& context() const { return *ctx_; }

  /// score(T', T) for corpus table `table`, aligned on column `col` of T'.
  double table_score(Matcher m, std::uint32_t table, std::uint32_t col);
  double head_sim(HeadSim s, const std::string& h_prime) const;
  /// Eq. top/all value score over the candidate's supporting tables.
  double tc_score(const Candidate& c, Matcher m, Combine comb, HeadSim s);
  /// KB score: max over supporting predicates.
  double kb_score(const Candidate& c, KbVariant v) const;

  /// Full-schema feature vector.
  std::vector<double> features(const Candidate& c);

 private:
  const RankContext* ctx_;
  Target target_;
  std::vector<Candidate> pool_;
  TableProfile input_profile_;
  std::vector<double> input_quality_;
  std::map<std::tuple<int, std::uint32_t, std::uint32_t>, double> table_scores_;
};

struct RankedSuggestion {
  Candidate candidate;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

/// Sorts by score descending, canonical form ascending; assigns ranks.
std::vector<RankedSuggestion> finalize_ranking(std::vector<std::pair<Candidate, double>> scored);

std::vector<RankedSuggestion> kb_rank(CellScorer& cell, KbVariant variant, double gamma);
std::vector<RankedSuggestion> tc_rank(CellScorer& cell, Matcher m, Combine comb, HeadSim s);
/// KB candidates (ED) first, then table-corpus candidates, then Empty.
std::vector<RankedSuggestion> otg_rank(CellScorer& cell);
std::vector<RankedSuggestion> ltr_rank(CellScorer& cell, const Forest& model);

/// Ground truth for one cell: correct values and/or the Empty sentinel.
struct Truth {
  std::vector<NormalizedValue> values;
  bool empty = false;
};

bool is_correct(const Candidate& c, const Truth& truth);

/// Pool, full-schema features and binary labels of one training cell.
struct CellFeatures {
  std::vector<Candidate> pool;
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
};

CellFeatures extract_cell_features(CellScorer& cell, const Truth& truth);

/// Pointwise forest over the selected feature columns.
Forest train_ltr(const std::vector<const CellFeatures*>& cells, FeatureSet set, const ForestParams& params);
/// Ranks a pool whose full-schema features are precomputed.
std::vector<RankedSuggestion> rank_precomputed(const CellFeatures& cell, const Forest& model);

/// Deterministic fold assignment (0..folds-1) for n items.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t folds, std::uint64_t seed);

/// k-fold cross-validated rankings, one per cell, in input order.
std::vector<std::vector<RankedSuggestion>> cross_validate_ltr(const std::vector<CellFeatures>& cells, FeatureSet set,
                                                               const ForestParams& params, std::size_t folds,
                                                               std::uint64_t seed);

/// `tc:<table_id>:<h'>` and `kb:<predicate>` tokens joined by ';'.
std::string provenance_summary(const Candidate& c);

/// Run-file lines `cell_id␉rank␉value␉score␉provenance`.
void write_run(std::ostream& out, const std::string& cell_id, const std::vector<RankedSuggestion>& ranking);

std::string to_string(KbVariant v);
std::string to_string(Matcher m);
std::string to_string(Combine c);
std::string to_string(HeadSim s);

}  // namespace cellac
