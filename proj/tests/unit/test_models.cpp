#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "cellac/embeddings.hpp"
#include "cellac/forest.hpp"
#include "cellac/table_match.hpp"
#include "fixtures.hpp"

using namespace cellac;
using namespace cellac::test;

namespace {

std::vector<TrainingSample> threshold_data(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TrainingSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng);
    out.push_back({{x, u(rng)}, x > 0.5 ? 1.0 : 0.0});
  }
  return out;
}

std::string dump(const Forest& f) {
  std::stringstream ss;
  f.save(ss);
  return ss.str();
}

}  // namespace

TEST(Forest, SameSeedGivesIdenticalFile) {
  ForestParams p{.n_trees = 20, .seed = 42};
  auto a = Forest::fit({"x", "noise"}, threshold_data(200, 1), p);
  auto b = Forest::fit({"x", "noise"}, threshold_data(200, 1), p);
  EXPECT_EQ(dump(a), dump(b));
  p.seed = 43;
  EXPECT_NE(dump(Forest::fit({"x", "noise"}, threshold_data(200, 1), p)), dump(a));
}

TEST(Forest, IndependentOfSampleOrder) {
  ForestParams p{.n_trees = 10, .seed = 5};
  auto data = threshold_data(150, 2);
  auto shuffled = data;
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_EQ(dump(Forest::fit({"x", "noise"}, data, p)), dump(Forest::fit({"x", "noise"}, shuffled, p)));
}

TEST(Forest, LearnsThresholdAndRanksImportance) {
  auto data = threshold_data(400, 3);
  auto f = Forest::fit({"x", "noise"}, data, ForestParams{.n_trees = 50, .seed = 1});
  double mse = 0.0;
  for (const auto& s : data) mse += std::pow(f.predict(s.x) - s.y, 2);
  EXPECT_LT(mse / static_cast<double>(data.size()), 0.05);
  const auto& imp = f.importance();
  EXPECT_NEAR(std::accumulate(imp.begin(), imp.end(), 0.0), 1.0, 1e-9);
  EXPECT_GT(imp[0], imp[1]);
}

TEST(Forest, ConstantTargetHasNoSplits) {
  std::vector<TrainingSample> data = {{{1.0}, 0.3}, {{2.0}, 0.3}, {{3.0}, 0.3}};
  auto f = Forest::fit({"x"}, data, ForestParams{.n_trees = 5});
  EXPECT_DOUBLE_EQ(f.predict(std::vector<double>{7.0}), 0.3);
  EXPECT_EQ(f.importance(), std::vector<double>{0.0});
}

TEST(Forest, RejectsBadInput) {
  EXPECT_THROW(Forest::fit({"x"}, {}, {}), std::invalid_argument);
  EXPECT_THROW(Forest::fit({"x"}, {{{1.0, 2.0}, 1.0}}, {}), std::invalid_argument);
  EXPECT_THROW(Forest::fit({"x"}, {{{1.0}, std::nan("")}}, {}), std::invalid_argument);
  auto f = Forest::fit({"x"}, {{{1.0}, 1.0}, {{2.0}, 0.0}}, ForestParams{.n_trees = 2});
  EXPECT_THROW(f.predict(std::vector<double>{1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(f.predict(FeatureVector{{"y"}, {1.0}}), std::invalid_argument);
}

TEST(Forest, SaveLoadRoundTrip) {
  auto f = Forest::fit({"x", "noise"}, threshold_data(100, 4), ForestParams{.n_trees = 8});
  std::stringstream ss(dump(f));
  auto back = Forest::load(ss);
  EXPECT_EQ(dump(back), dump(f));
  for (double x : {0.1, 0.49, 0.51, 0.9}) EXPECT_DOUBLE_EQ(back.predict(std::vector<double>{x, 0.5}), f.predict(std::vector<double>{x, 0.5}));
  std::stringstream bad("not a forest\n");
  EXPECT_THROW(Forest::load(bad), std::runtime_error);
}

TEST(Embeddings, DeterministicAndRelatedLabelsCloser) {
  // "director" and "directed by" occur with the same companions; "population"
  // never does.
  std::vector<std::vector<std::string>> sentences;
  for (int i = 0; i < 60; ++i) {
    sentences.push_back({"film", "director", "year", "studio"});
    sentences.push_back({"title", "directed by", "year", "studio"});
    sentences.push_back({"city", "population", "country", "mayor"});
  }
  EmbeddingParams p{.dim = 16, .epochs = 20, .min_count = 1, .seed = 3};
  auto a = LabelEmbeddings::train(sentences, p);
  auto b = LabelEmbeddings::train(sentences, p);
  EXPECT_EQ(a.vectors(), b.vectors());
  EXPECT_EQ(a.dim(), 16u);
  EXPECT_GT(a.cosine("director", "directed by"), a.cosine("director", "population"));
  EXPECT_DOUBLE_EQ(l2v_sim("director", "director", a), 1.0);
  EXPECT_EQ(l2v_sim("director", "unseen label", a), 0.0);
  for (const auto& [label, v] : a.vectors())
    for (float x : v) EXPECT_TRUE(std::isfinite(x));
}

TEST(Embeddings, SaveLoadAndErrors) {
  LabelEmbeddings e(2, {{"a", {1.0f, 0.0f}}, {"b b", {0.0f, 1.0f}}});
  std::stringstream ss;
  e.save(ss);
  auto back = LabelEmbeddings::load(ss);
  EXPECT_EQ(back.vectors(), e.vectors());
  EXPECT_DOUBLE_EQ(back.cosine("a", "b b"), 0.0);
  EXPECT_THROW(LabelEmbeddings::train(std::vector<std::vector<std::string>>{{"x"}}, EmbeddingParams{}),
               std::invalid_argument);
}

TEST(TableMatch, QualityFeaturesCountShape) {
  auto t = make_table("q", {"Name", "A", "B", "C"}, {{"@X", "1", "", "z"}, {"@Y", "2", "w", ""}, {"@Z", "3", "v", "u"}});
  Corpus corpus(std::vector<RelationalTable>{t});
  auto q = quality_features(t, corpus);
  EXPECT_EQ(q[0], 3.0);
  EXPECT_EQ(q[1], 4.0);
  EXPECT_EQ(q[2], 2.0);
  EXPECT_EQ(quality_feature_names().size(), q.size());
}

TEST(TableMatch, IdfSum) {
  auto c = film_corpus();
  // "thriller" occurs in one of four tables, "films" in three.
  EXPECT_NEAR(idf_sum("thriller", c), std::log(4.0), 1e-12);
  EXPECT_NEAR(idf_sum("films thriller", c), std::log(4.0 / 3.0) + std::log(4.0), 1e-12);
  EXPECT_EQ(idf_sum("x", Corpus{}), 0.0);
}

TEST(TableMatch, InfoGatherPrefersRelatedTable) {
  auto c = film_corpus();
  const auto& a = c.table(*c.find("films_a"));
  const auto& b = c.table(*c.find("films_b"));
  const auto& cities = c.table(*c.find("cities"));
  EXPECT_GT(infogather_score(a, b, kDefaultIgWeights), infogather_score(a, cities, kDefaultIgWeights));
  EXPECT_NEAR(infogather_score(a, a, kDefaultIgWeights), 1.0, 1e-9);
}

TEST(TableMatch, SymmetricMeasures) {
  auto c = film_corpus();
  auto pa = make_profile(c.table(*c.find("films_a")));
  auto pc = make_profile(c.table(*c.find("films_c")));
  EXPECT_NEAR(related_data_sim(pa, pc), related_data_sim(pc, pa), 1e-12);
  auto ab = complement_scores(pa, pc, c);
  auto ba = complement_scores(pc, pa, c);
  EXPECT_NEAR(ab.entity_relatedness, ba.entity_relatedness, 1e-12);
  EXPECT_GT(ab.entity_overlap, 0.0);
}

TEST(TableMatch, FeatureWidthAndTraining) {
  auto c = film_corpus();
  const auto& a = c.table(0);
  const auto& b = c.table(1);
  auto f = extract_match_features(a, make_profile(a), b, make_profile(b), c);
  EXPECT_EQ(f.size(), tmatch_feature_names().size());
  for (double x : f) EXPECT_TRUE(std::isfinite(x));

  std::vector<GradedPair> pairs = {{"films_a", "films_b", 2}, {"films_a", "films_c", 1}, {"films_a", "cities", 0},
                                   {"films_b", "films_c", 2}, {"cities", "films_b", 0}, {"films_c", "cities", 0}};
  auto model = train_tmatch(pairs, c, ForestParams{.n_trees = 20});
  auto pa = make_profile(c.table(*c.find("films_a")));
  auto pb = make_profile(c.table(*c.find("films_b")));
  auto pcity = make_profile(c.table(*c.find("cities")));
  const auto& ta = c.table(*c.find("films_a"));
  EXPECT_GT(tmatch_score(model, ta, pa, c.table(*c.find("films_b")), pb, c),
            tmatch_score(model, ta, pa, c.table(*c.find("cities")), pcity, c));
  EXPECT_THROW(train_tmatch({{"films_a", "nope", 1}}, c, {}), std::invalid_argument);
}

TEST(TableMatch, GradedPairsIo) {
  std::vector<GradedPair> pairs = {{"a", "b", 2}, {"a", "c", 0}};
  std::stringstream ss;
  write_graded_pairs(ss, pairs);
  auto back = read_graded_pairs(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].grade, 2);
  std::stringstream bad("a\tb\n");
  EXPECT_THROW(read_graded_pairs(bad), std::runtime_error);
}
