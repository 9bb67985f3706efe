#include <gtest/gtest.h>

#include <sstream>

#include "cellac/bipartite.hpp"
#include "cellac/corpus.hpp"
#include "cellac/edit_distance.hpp"
#include "cellac/heading_stats.hpp"
#include "cellac/kb.hpp"
#include "cellac/table_match.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cellac;
using namespace cellac::test;

TEST(Corpus, CoreColumnPrefersEntityRate) {
  auto left = make_table("a", {"Name", "Team"}, {{"@A", "@X"}, {"@B", "x"}});
  EXPECT_EQ(left.core_column, 0u);
  auto right = make_table("b", {"Rank", "Name"}, {{"1", "@A"}, {"2", "@B"}});
  EXPECT_EQ(right.core_column, 1u);
  auto tie = make_table("c", {"P", "Q"}, {{"@A", "@X"}});
  EXPECT_EQ(tie.core_column, 0u);
  EXPECT_DOUBLE_EQ(entity_rate(left, 1), 0.5);
  EXPECT_THROW(entity_rate(left, 5), std::out_of_range);
}

TEST(Corpus, HeadingsNormalizedAndCellsTyped) {
  auto t = make_table("a", {" Directed  BY", "Year"}, {{"@Alien", "1979"}, {"@Heat", ""}});
  EXPECT_EQ(t.headings[0], "directed by");
  EXPECT_TRUE(t.at(1, 1).empty());
  ASSERT_FALSE(t.at(0, 1).empty());
  EXPECT_EQ(t.at(0, 1).norm->type, ValueType::DateTime);
  EXPECT_EQ(t.empty_cells(), 1u);
}

TEST(Corpus, RejectsMalformedRecords) {
  EXPECT_THROW(table_from_json(nlohmann::json::parse(R"({"id":"x","rows":[]})")), std::invalid_argument);
  EXPECT_THROW(table_from_json(nlohmann::json::parse(R"({"id":"x","headings":["a","b"],"rows":[["1"]]})")),
               std::invalid_argument);
}

TEST(Corpus, IngestSkipsBadLinesAndDuplicates) {
  std::stringstream in;
  in << "# cellac-corpus v1\n";
  in << table_json("b", {"Name", "Year"}, {{"@X", "1990"}}).dump() << "\n";
  in << "{not json\n";
  in << table_json("a", {"Name", "Year"}, {{"@Y", "1991"}}).dump() << "\n";
  in << table_json("a", {"Name", "Year"}, {{"@Z", "1992"}}).dump() << "\n";
  in << "\n";
  auto c = Corpus::ingest_stream(in);
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.skipped_count(), 2u);
  EXPECT_EQ(c.table(0).id, "a");
  EXPECT_EQ(c.table(0).rows[0][0].entity, "Y");
}

TEST(Corpus, IndexesAreOrderIndependent) {
  auto base = film_corpus();
  std::vector<RelationalTable> reversed(base.tables().rbegin(), base.tables().rend());
  Corpus other(reversed);
  EXPECT_EQ(base.index().by_entity, other.index().by_entity);
  EXPECT_EQ(base.index().by_entity_heading, other.index().by_entity_heading);
}

TEST(Corpus, Lookups) {
  auto c = film_corpus();
  EXPECT_EQ(c.rows_of("Alien").size(), 3u);
  EXPECT_EQ(c.cells_of("Alien", "director").size(), 2u);
  EXPECT_TRUE(c.rows_of("Nobody").empty());
  EXPECT_EQ(c.tables_with_entity("Jaws").size(), 3u);
  EXPECT_TRUE(c.find("films_b").has_value());
  EXPECT_FALSE(c.find("missing").has_value());
  auto reduced = c.without({"films_b"});
  EXPECT_EQ(reduced.size(), 3u);
  EXPECT_EQ(reduced.rows_of("Alien").size(), 2u);
}

TEST(Corpus, JsonRoundTrip) {
  auto c = film_corpus();
  std::stringstream ss;
  c.write_jsonl(ss);
  auto back = Corpus::ingest_stream(ss);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(table_to_json(back.table(i)), table_to_json(c.table(i)));
}

TEST(Kb, LoadDeduplicatesAndCounts) {
  std::stringstream triples("a\tp1\tx\na\tp1\tx\na\tp2\ty\nb\tp1\tz\nbroken line\n");
  std::stringstream labels("p1\tFirst Label\np1\tignored\n");
  auto kb = KnowledgeBase::load_streams(triples, labels);
  EXPECT_EQ(kb.triple_count(), 3u);
  EXPECT_EQ(kb.skipped_count(), 1u);
  EXPECT_EQ(kb.label("p1"), "first label");
  EXPECT_EQ(kb.predicates_of("a"), (std::vector<std::string>{"p1", "p2"}));
  EXPECT_TRUE(kb.predicates_of("nobody").empty());
  EXPECT_TRUE(kb.lookup("a", "p9").empty());
}

TEST(Kb, EmptyFiles) {
  std::stringstream t, l;
  auto kb = KnowledgeBase::load_streams(t, l);
  EXPECT_EQ(kb.triple_count(), 0u);
}

TEST(Kb, DefaultLabelSplitsCamelCase) {
  EXPECT_EQ(default_predicate_label("dbp:timeZone"), "time zone");
  EXPECT_EQ(default_predicate_label("<http://dbpedia.org/ontology/birthPlace>"), "birth place");
  KnowledgeBase kb;
  kb.add({"x", "dbo:timeZone", "UTC"});
  EXPECT_EQ(kb.label("dbo:timeZone"), "time zone");
}

TEST(Kb, LookupIffPredicateListed) {
  auto kb = film_kb();
  for (const auto& e : {"Alien", "Gattaca", "Jaws", "Nobody"}) {
    auto preds = kb.predicates_of(e);
    for (const auto& p : kb.predicates()) {
      const bool listed = std::find(preds.begin(), preds.end(), p) != preds.end();
      EXPECT_EQ(!kb.lookup(e, p).empty(), listed) << e << " " << p;
    }
  }
}

TEST(HeadingStats, FilmFixtureCounts) {
  auto c = film_corpus();
  auto kb = film_kb();
  auto s = HeadingStats::build(c, kb);
  // Alien, Heat and Jaws agree on the director in films_a/films_b; Alien,
  // Jaws and Brazil in films_a/films_c; Alien, Jaws, Gattaca in films_b/films_c.
  EXPECT_EQ(s.n_h2h("directed by", "director"), 6u);
  EXPECT_EQ(s.n_h2h("director", "directed by"), 6u);
  EXPECT_EQ(s.n_h2h("director", "director"), 3u);
  EXPECT_EQ(s.n_h2h("released", "year"), 3u);
  EXPECT_EQ(s.n_h2h("studio", "year"), 0u);
  // Director cells matching dbo:director: films_a has Alien, Heat, Ran,
  // Brazil; films_c has Alien, Gattaca, Brazil.
  EXPECT_EQ(s.n_h2p("director", "dbo:director"), 7u);
  EXPECT_EQ(s.n_h2p("directed by", "dbo:director"), 3u);
  EXPECT_EQ(s.n_h2p("directed by", "dbo:writer"), 1u);
  // Gattaca's writer is also its director, so the director column shares
  // one count with dbo:writer.
  EXPECT_EQ(s.n_h2p("director", "dbo:writer"), 1u);
  EXPECT_NEAR(s.p_p2h("dbo:director", "director"), 7.0 / 8.0, 1e-12);
  EXPECT_EQ(s.p_h2h("anything", "unknown"), 0.0);
}

TEST(HeadingStats, EmptyCellsNeverCount) {
  std::vector<RelationalTable> ts = {make_table("a", {"Name", "X"}, {{"@E", ""}}),
                                     make_table("b", {"Name", "Y"}, {{"@E", ""}})};
  Corpus c(ts);
  auto kb = make_kb({{"E", "p", ""}, {"E", "q", "-"}});
  auto s = HeadingStats::build(c, kb);
  EXPECT_TRUE(s.h2h().empty());
  EXPECT_TRUE(s.h2p().empty());
}

TEST(HeadingStats, MatchesOracleOnRandomCorpora) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto w = random_world(seed);
    EXPECT_EQ(HeadingStats::build_h2h(w.corpus), oracle_h2h(w.corpus)) << "seed " << seed;
    EXPECT_EQ(HeadingStats::build_h2p(w.corpus, w.kb), oracle_h2p(w.corpus, w.kb)) << "seed " << seed;
  }
}

TEST(HeadingStats, SymmetricWithConsistentTotals) {
  auto w = random_world(99);
  HeadingStats s;
  s.set_h2h(HeadingStats::build_h2h(w.corpus));
  for (const auto& [h, row] : s.h2h()) {
    std::uint64_t sum = 0;
    for (const auto& [hp, n] : row) {
      EXPECT_EQ(n, s.n_h2h(h, hp));
      sum += n;
    }
    double p = 0.0;
    for (const auto& [hp, n] : row) p += s.p_h2h(hp, h);
    if (sum > 0) EXPECT_NEAR(p, 1.0, 1e-12);
  }
}

TEST(HeadingStats, SaveLoadRoundTrip) {
  auto s = HeadingStats::build(film_corpus(), film_kb());
  auto dir = temp_dir("stats");
  s.save(dir / "h2h.tsv", dir / "h2p.tsv");
  auto back = HeadingStats::load(dir / "h2h.tsv", dir / "h2p.tsv");
  EXPECT_TRUE(back == s);
  std::stringstream bad("# wrong header\n");
  EXPECT_THROW(HeadingStats::load_counts(bad, HeadingStats::kH2hHeader), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(Bipartite, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 200; ++n) {
    const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 6;
    std::vector<std::vector<double>> w(rows, std::vector<double>(cols, 0.0));
    for (auto& r : w)
      for (auto& x : r)
        if (rng() % 3) x = static_cast<double>(rng() % 1000) / 1000.0;
    auto m = max_weight_matching(w);
    ASSERT_NEAR(m.total, exhaustive_matching(w), 1e-9);
    std::set<int> used;
    double sum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (m.assignment[i] < 0) continue;
      EXPECT_TRUE(used.insert(m.assignment[i]).second);
      sum += w[i][static_cast<std::size_t>(m.assignment[i])];
    }
    EXPECT_NEAR(sum, m.total, 1e-9);
  }
}

TEST(Bipartite, EmptyMatrix) {
  std::vector<std::vector<double>> w;
  EXPECT_EQ(max_weight_matching(w).total, 0.0);
}

TEST(Msje, ThresholdAndNormalization) {
  // Only "director" ~ "directors" clears 0.8; divided by max(2, 3).
  std::vector<std::string> a = {"director", "year"};
  std::vector<std::string> b = {"directors", "studio", "country"};
  EXPECT_NEAR(msje_heading_score(a, b, 0.8), edit_sim("director", "directors") / 3.0, 1e-12);
  EXPECT_NEAR(msje_heading_score(a, a, 0.8), 1.0, 1e-12);
  EXPECT_EQ(msje_heading_score({}, b, 0.8), 0.0);
}
