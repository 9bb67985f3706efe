#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cellac/eval.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cellac;
using namespace cellac::test;

TEST(Ndcg, HandComputedFixtures) {
  EXPECT_DOUBLE_EQ(ndcg_at_k({"a", "b", "x"}, {"a", "b"}, 5), 1.0);
  const double rank2 = 1.0 / std::log2(3.0);
  EXPECT_NEAR(ndcg_at_k({"x", "a", "y"}, {"a"}, 5), rank2, 1e-12);
  EXPECT_NEAR(ndcg_at_k({"x", "a", "y"}, {"a"}, 5), 0.63093, 1e-5);
  EXPECT_EQ(ndcg_at_k({"x", "y"}, {"a"}, 5), 0.0);
  EXPECT_EQ(ndcg_at_k(std::vector<std::string>{}, {"a"}, 10), 0.0);
  // Outside the cut-off.
  EXPECT_EQ(ndcg_at_k({"1", "2", "3", "4", "5", "a"}, {"a"}, 5), 0.0);
}

TEST(Ndcg, RejectsZeroCutoff) {
  EXPECT_THROW(ndcg_at_k(std::vector<int>{1}, 1, 0), std::invalid_argument);
}

TEST(Ndcg, MatchesDefinitionOnRandomGains) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 500; ++n) {
    std::vector<int> gains(rng() % 15);
    std::size_t rel = 0;
    for (auto& g : gains) rel += (g = static_cast<int>(rng() % 2));
    const std::size_t universe = rel + rng() % 3;
    for (std::size_t k : {1u, 5u, 10u}) EXPECT_NEAR(ndcg_at_k(gains, universe, k), oracle_ndcg(gains, universe, k), 1e-12);
  }
}

TEST(Ndcg, PermutationBelowCutoffInvariant) {
  EXPECT_DOUBLE_EQ(ndcg_at_k({"a", "x", "y", "z", "w", "b", "q"}, {"a", "b"}, 5),
                   ndcg_at_k({"a", "w", "z", "y", "x", "q", "b"}, {"a", "b"}, 5));
}

TEST(Ndcg, MatchesNormalizedValues) {
  EXPECT_DOUBLE_EQ(ndcg_at_k({"100 M"}, {"100 m"}, 5), 1.0);
  EXPECT_DOUBLE_EQ(ndcg_at_k({"100 km"}, {"100 m"}, 5), 0.0);
  // One ranked value cannot satisfy two correct entries.
  EXPECT_NEAR(ndcg_at_k({"a", "a"}, {"a", "b"}, 5), 1.0 / (1.0 + 1.0 / std::log2(3.0)), 1e-12);
}

TEST(Evaluate, PerfectRunScoresOneInBothConditions) {
  Qrels q = {{"c1", {"a"}}, {"c2", {"EMPTY"}}, {"c3", {"b", "EMPTY"}}};
  cellac::Run r = {{"c1", {"a", "EMPTY"}}, {"c2", {"EMPTY", "z"}}, {"c3", {"b", "EMPTY"}}};
  auto rep = evaluate(r, q);
  EXPECT_DOUBLE_EQ(rep.included.ndcg10, 1.0);
  EXPECT_DOUBLE_EQ(rep.excluded.ndcg10, 1.0);
  EXPECT_EQ(rep.included.cells, 3u);
  EXPECT_EQ(rep.excluded.cells, 2u);
}

TEST(Evaluate, MeanOverCells) {
  // Cell 1 perfect; cell 2 has its two values at ranks 1 and 3:
  // (1 + 1/2) / (1 + 1/log2 3).
  Qrels q = {{"c1", {"a"}}, {"c2", {"b", "c"}}};
  cellac::Run r = {{"c1", {"a"}}, {"c2", {"b", "x", "c"}}};
  const double c2 = 1.5 / (1.0 + 1.0 / std::log2(3.0));
  auto rep = evaluate(r, q);
  EXPECT_NEAR(rep.included.ndcg5, (1.0 + c2) / 2.0, 1e-12);
  Qrels q2 = {{"c1", {"a"}}, {"c2", {"b"}}};
  cellac::Run r2 = {{"c1", {"a"}}, {"c2", {"x", "b"}}};
  EXPECT_NEAR(evaluate(r2, q2).included.ndcg5, (1.0 + 1.0 / std::log2(3.0)) / 2.0, 1e-12);
}

TEST(Evaluate, ConditionIdentities) {
  // Empty-excluded NDCG equals Empty-included NDCG on the run with Empty
  // deleted and Empty removed from the truth, for cells with non-Empty truth.
  Qrels q = {{"c1", {"a", "EMPTY"}}, {"c2", {"b"}}, {"c3", {"EMPTY"}}, {"c4", {"d", "e"}}};
  cellac::Run r = {{"c1", {"EMPTY", "x", "a"}}, {"c2", {"EMPTY", "b"}}, {"c3", {"y", "EMPTY"}}, {"c4", {"e", "EMPTY", "z", "d"}}};
  auto rep = evaluate(r, q);
  EXPECT_EQ(rep.per_cell_excluded.count("c3"), 0u);
  Qrels q_stripped;
  cellac::Run r_stripped;
  for (const auto& [cell, truth] : q) {
    std::set<std::string> t;
    for (const auto& v : truth)
      if (v != "EMPTY") t.insert(v);
    if (t.empty()) continue;
    q_stripped[cell] = t;
    for (const auto& v : r[cell])
      if (v != "EMPTY") r_stripped[cell].push_back(v);
  }
  auto plain = evaluate(r_stripped, q_stripped);
  for (const auto& [cell, scores] : rep.per_cell_excluded) {
    EXPECT_DOUBLE_EQ(scores.first, plain.per_cell_included.at(cell).first) << cell;
    EXPECT_DOUBLE_EQ(scores.second, plain.per_cell_included.at(cell).second) << cell;
  }
  EXPECT_DOUBLE_EQ(rep.excluded.ndcg10, plain.included.ndcg10);
  // Empty is an ordinary value when included: c3 has it at rank 2.
  EXPECT_NEAR(rep.per_cell_included.at("c3").first, 1.0 / std::log2(3.0), 1e-12);
}

TEST(Evaluate, MissingQrelsIsAnError) {
  EXPECT_THROW(evaluate({{"ghost", {"a"}}}, {{"c1", {"a"}}}), std::invalid_argument);
  auto rep = evaluate({}, {{"c1", {"a"}}});
  EXPECT_EQ(rep.included.ndcg10, 0.0);
}

TEST(Evaluate, CollectionStats) {
  Qrels q = {{"c1", {"a", "b"}}, {"c2", {"EMPTY"}}, {"c3", {"c", "EMPTY"}}, {"c4", {"d"}}};
  auto s = collection_stats(q);
  EXPECT_EQ(s.cells, 4u);
  EXPECT_DOUBLE_EQ(s.avg_values, 4.0 / 4.0);
  EXPECT_DOUBLE_EQ(s.empty_rate, 2.0 / 4.0);
}

TEST(EvalFiles, RunAndQrelsRoundTrip) {
  Qrels q = {{"c1", {"a", "b"}}, {"c2", {"EMPTY"}}};
  std::stringstream qs;
  write_qrels(qs, q);
  EXPECT_EQ(read_qrels(qs), q);
  std::stringstream rs("# header\nc1\t2\tb\t0.5\tkb:p\nc1\t1\ta\t0.9\ttc:t:h\nc2\t1\tEMPTY\t0.1\t\n");
  auto run = read_run(rs);
  EXPECT_EQ(run["c1"], (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(run["c2"], (std::vector<std::string>{"EMPTY"}));
  std::stringstream bad("c1\tfirst\ta\n");
  EXPECT_THROW(read_run(bad), std::runtime_error);
}

TEST(TestCollection, FourTypesFromDistinctTables) {
  auto corpus = four_type_corpus(8);
  auto tc = build_test_collection(corpus, 1, 1, 5);
  ASSERT_EQ(tc.cells.size(), 4u);
  std::set<std::string> tables;
  std::set<ValueType> types;
  for (const auto& c : tc.cells) {
    tables.insert(c.table_id);
    types.insert(c.type);
  }
  EXPECT_EQ(tables.size(), 4u);
  EXPECT_EQ(types.size(), 4u);
  EXPECT_EQ(tc.corpus.size(), 4u);
  for (const auto& id : tables) EXPECT_FALSE(tc.corpus.find(id).has_value());
}

TEST(TestCollection, StratifiedCounts) {
  auto tc = build_test_collection(four_type_corpus(8), 2, 3, 1);
  EXPECT_EQ(tc.cells.size(), 2u * 4u * 3u);
  EXPECT_EQ(tc.corpus.size(), 0u);
}

TEST(TestCollection, DeterministicForSeed) {
  auto corpus = four_type_corpus(12);
  auto a = build_test_collection(corpus, 2, 2, 9);
  auto b = build_test_collection(corpus, 2, 2, 9);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) EXPECT_EQ(a.cells[i].cell_id, b.cells[i].cell_id);
}

TEST(TestCollection, NamesDeficientType) {
  try {
    build_test_collection(four_type_corpus(3), 1, 1, 1);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("DateTime"), std::string::npos) << e.what();
  }
}

TEST(TestCollection, ConcealAndQrels) {
  auto tc = build_test_collection(four_type_corpus(4), 1, 2, 3);
  auto q = qrels_from_originals(tc);
  EXPECT_EQ(q.size(), tc.cells.size());
  for (const auto& c : tc.cells) {
    auto hidden = conceal(tc.input_table(c), c);
    EXPECT_TRUE(hidden.at(c.row, c.col).empty());
    EXPECT_FALSE(tc.input_table(c).at(c.row, c.col).empty());
    EXPECT_EQ(q[c.cell_id].size(), 1u);
  }
}

TEST(TestCollection, FileRoundTrip) {
  auto tc = build_test_collection(four_type_corpus(8), 1, 3, 2);
  std::stringstream ss;
  write_testset(ss, tc);
  auto back = read_testset(ss);
  ASSERT_EQ(back.cells.size(), tc.cells.size());
  for (std::size_t i = 0; i < tc.cells.size(); ++i) {
    EXPECT_EQ(back.cells[i].cell_id, tc.cells[i].cell_id);
    EXPECT_EQ(back.cells[i].type, tc.cells[i].type);
    EXPECT_EQ(back.cells[i].concealed, tc.cells[i].concealed);
  }
  EXPECT_EQ(qrels_from_originals(back), qrels_from_originals(tc));
  std::stringstream bad("not a header\n");
  EXPECT_THROW(read_testset(bad), std::runtime_error);
}
