#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cellac/candidates.hpp"
#include "cellac/embeddings.hpp"
#include "cellac/eval.hpp"
#include "cellac/forest.hpp"
#include "cellac/ranker.hpp"
#include "cellac/synthetic.hpp"
#include "cellac/table_match.hpp"

namespace cellac {

class KnowledgeBase;

struct BenchmarkConfig {
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  ForestParams ltr{.n_trees = 300};
  ForestParams tmatch;
  EmbeddingParams embeddings;
  TableMatchConfig table_match;
  CandidateConfig candidates;
  double gamma_step = 0.05;
  /// Also run the sixteen table-corpus-only variants.
  bool tc_grid = true;
};

struct MethodResult {
  std::string name;
  Run run;
  EvalReport report;
};

struct BenchmarkResult {
  Qrels qrels;
  CollectionStats stats;
  std::vector<MethodResult> methods;
  double gamma_ed = 0.0;  // mean tuned gamma across folds
  double gamma_mp = 0.0;
  /// Gini importances of the full model trained on all cells.
  std::vector<std::pair<std::string, double>> importance;

  const MethodResult& method(const std::string& name) const;
  /// Best NDCG@10 among the KB-only and table-corpus-only methods.
  double best_single_source(bool empty_included) const;
  /// Mean Empty-included NDCG@10 over cells whose only correct value is Empty.
  double empty_cell_ndcg10(const std::string& name) const;
};

inline constexpr const char* kMethodOtg = "OTG";
inline constexpr const char* kMethodLtrI = "CAC(I)";
inline constexpr const char* kMethodLtrII = "CAC(I+II)";
inline constexpr const char* kMethodLtrIII = "CAC(I+II+III)";

Qrels qrels_from_truths(const std::map<std::string, Truth>& truths);
/// Truth = the concealed original value, or Empty for blank cells.
std::map<std::string, Truth> truths_from_originals(const TestCollection& tc);
std::vector<std::string> to_canonical(const std::vector<RankedSuggestion>& ranking);

/// Runs the value-finding grid on a test collection: KB-only (ED, MP with
/// cross-validated gamma), table-corpus-only variants, OTG and the learned
/// ranker with feature groups I, I+II and I+II+III (cross-validated).
/// Statistics, embeddings and the table matcher are built from the reduced
/// corpus; matcher training pairs touching test tables are dropped.
BenchmarkResult run_benchmark(const TestCollection& tc, const KnowledgeBase& kb,
                              const std::map<std::string, Truth>& truths, const std::vector<GradedPair>& tmatch_pairs,
                              const BenchmarkConfig& config);

/// Generates a world, samples per_type columns of each main type with
/// cells_per_column cells each, and runs the grid. All seeds derive from
/// params.seed.
BenchmarkResult run_synthetic_benchmark(const SyntheticParams& params, std::size_t per_type,
                                        std::size_t cells_per_column, BenchmarkConfig config = {});

}  // namespace cellac
