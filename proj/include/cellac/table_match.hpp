#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cellac/forest.hpp"
#include "cellac/text.hpp"

namespace cellac {

struct RelationalTable;
class Corpus;

/// Term vectors of one table, computed once and reused across comparisons.
struct TableProfile {
  TermVector data;                       // all cell texts
  TermVector title;                      // page title
  TermVector headings;                   // all heading terms
  std::vector<TermVector> columns;       // per column, TF
  std::vector<TermVector> column_bins;   // per column, binary
  std::vector<TermVector> heading_terms; // per heading label
  std::vector<std::string> heading_labels;
  std::set<std::string> entities;        // core-column entities
  std::size_t core_column = 0;
};

TableProfile make_profile(const RelationalTable& t);

/// (input column, candidate column) used for the column-values element;
/// core columns when absent.
using ColumnAlignment = std::optional<std::pair<std::size_t, std::size_t>>;

/// Element order: table data, column values, page title, heading labels.
using InfoGatherWeights = std::array<double, 4>;
inline constexpr InfoGatherWeights kDefaultIgWeights{0.25, 0.25, 0.25, 0.25};

std::array<double, 4> infogather_sims(const TableProfile& t, const TableProfile& c, ColumnAlignment aligned = {});
double infogather_score(const TableProfile& t, const TableProfile& c, const InfoGatherWeights& w,
                        ColumnAlignment aligned = {});
double infogather_score(const RelationalTable& t, const RelationalTable& c, const InfoGatherWeights& w,
                        ColumnAlignment aligned = {});

/// Max-weight matching between heading labels with edit-similarity edges at
/// or above `threshold`, divided by the larger heading count.
double msje_heading_score(const std::vector<std::string>& a, const std::vector<std::string>& b,
                          double threshold = 0.8);

/// Matching over heading term-vector cosines, divided by the smaller count.
double related_heading_sim(const TableProfile& t, const TableProfile& c);
/// Best-matching column cosine (binary term vectors) averaged over columns,
/// taken in both directions and averaged so the measure is symmetric.
double related_data_sim(const TableProfile& t, const TableProfile& c);

struct ComplementScores {
  double schema_benefit = 0.0;
  double entity_overlap = 0.0;
  double entity_relatedness = 0.0;
};

/// relatedness(e, e') is the Jaccard of the corpus tables containing each.
ComplementScores complement_scores(const TableProfile& t, const TableProfile& c, const Corpus& corpus);

/// Rows, columns, empty cells, caption IDF, page title IDF, in-links,
/// out-links, page views, 1/tables on page, table/page size ratio.
std::array<double, 10> quality_features(const RelationalTable& t, const Corpus& corpus);
const std::array<std::string, 10>& quality_feature_names();

/// Sum over distinct terms of ln(N / max(df, 1)); 0 for an empty corpus.
double idf_sum(std::string_view text, const Corpus& corpus);

struct TableMatchConfig {
  InfoGatherWeights ig_weights = kDefaultIgWeights;
  double msje_threshold = 0.8;
};

/// Quality features of both tables followed by ten matching features.
const std::vector<std::string>& tmatch_feature_names();
std::vector<double> extract_match_features(const RelationalTable& t, const TableProfile& tp,
                                           const RelationalTable& c, const TableProfile& cp, const Corpus& corpus,
                                           const TableMatchConfig& config = {}, ColumnAlignment aligned = {});

struct GradedPair {
  std::string input_id;
  std::string candidate_id;
  int grade = 0;  // 0 not relevant, 1 relevant, 2 highly relevant
};

/// `input␉candidate␉grade` lines; throws std::runtime_error on malformed input.
std::vector<GradedPair> read_graded_pairs(std::istream& in);
std::vector<GradedPair> read_graded_pairs(const std::filesystem::path& file);
void write_graded_pairs(std::ostream& out, const std::vector<GradedPair>& pairs);

/// Fits the matcher on grade/2 targets. Pair ids are resolved in `tables`
/// first, then in `corpus`; unknown ids throw std::invalid_argument.
Forest train_tmatch(const std::vector<GradedPair>& pairs, const Corpus& corpus, const ForestParams& params,
                    const TableMatchConfig& config = {}, const std::vector<RelationalTable>& tables = {});

double tmatch_score(const Forest& model, const RelationalTable& t, const TableProfile& tp, const RelationalTable& c,
                    const TableProfile& cp, const Corpus& corpus, const TableMatchConfig& config = {},
                    ColumnAlignment aligned = {});

}  // namespace cellac
