#include <gtest/gtest.h>

#include <random>

#include "cellac/edit_distance.hpp"
#include "cellac/text.hpp"
#include "cellac/types.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace cellac;

namespace {

// Full-matrix Levenshtein over code points, written independently of the
// two-row implementation.
std::size_t dp_oracle(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

}  // namespace

TEST(Text, TrimAndCollapse) {
  EXPECT_EQ(trim("  a b \t"), "a b");
  EXPECT_EQ(collapse_whitespace("  a   b\n c "), "a b c");
  EXPECT_EQ(trim(""), "");
}

TEST(Text, NormalizeLabelFoldsCaseAndSpace) {
  EXPECT_EQ(normalize_label("  Directed   BY "), "directed by");
  EXPECT_EQ(normalize_label("ÉCOLE"), "école");
}

TEST(Text, CamelCaseSplit) {
  EXPECT_EQ(split_camel_case("timeZone"), "time zone");
  EXPECT_EQ(split_camel_case("release_year"), "release year");
}

TEST(Text, CosineOfTermVectors) {
  auto a = term_vector("red fox");
  auto b = term_vector("red dog");
  EXPECT_NEAR(cosine(a, b), 0.5, 1e-12);
  EXPECT_NEAR(cosine(a, a), 1.0, 1e-12);
  EXPECT_EQ(cosine(a, TermVector{}), 0.0);
}

TEST(Text, FormatNumber) {
  EXPECT_EQ(format_number(100), "100");
  EXPECT_EQ(format_number(-54), "-54");
  EXPECT_EQ(format_number(14.5), "14.5");
}

TEST(EditDistance, KnownPairs) {
  EXPECT_EQ(levenshtein(std::string("kitten"), std::string("sitting")), 3u);
  EXPECT_EQ(levenshtein(std::string(""), std::string("abc")), 3u);
  EXPECT_DOUBLE_EQ(edit_sim("", ""), 1.0);
  EXPECT_DOUBLE_EQ(edit_sim("director", "director"), 1.0);
  EXPECT_DOUBLE_EQ(edit_sim("abcd", "abce"), 0.75);
}

TEST(EditDistance, CountsCodePointsNotBytes) {
  EXPECT_DOUBLE_EQ(edit_sim("é", "e"), 0.0);
  EXPECT_DOUBLE_EQ(edit_sim("éa", "ea"), 0.5);
}

TEST(EditDistance, MatchesDpOracleOnRandomPairs) {
  std::mt19937_64 rng(7);
  const std::u32string alphabet = U"abcdeé ";
  for (int n = 0; n < 300; ++n) {
    std::u32string a, b;
    auto la = rng() % 31, lb = rng() % 31;
    for (std::size_t i = 0; i < la; ++i) a += alphabet[rng() % alphabet.size()];
    for (std::size_t i = 0; i < lb; ++i) b += alphabet[rng() % alphabet.size()];
    ASSERT_EQ(levenshtein(a, b), dp_oracle(a, b));
  }
}

TEST(Types, PaperNormalizationExamples) {
  auto yr = normalize("1998--99", ValueType::DateTime);
  ASSERT_TRUE(std::holds_alternative<YearRange>(yr.canonical));
  EXPECT_EQ(std::get<YearRange>(yr.canonical), (YearRange{1998, 1999}));
  EXPECT_EQ(yr.render(), "[1998,1999]");

  auto dr = normalize("5 October 1987 to 30 December 1987", ValueType::DateTime);
  ASSERT_TRUE(std::holds_alternative<DateRange>(dr.canonical));
  EXPECT_EQ(std::get<DateRange>(dr.canonical), (DateRange{"1987-10-05", "1987-12-30"}));

  auto m = normalize("100 m", ValueType::Quantity);
  ASSERT_TRUE(std::holds_alternative<QuantityValue>(m.canonical));
  EXPECT_EQ(std::get<QuantityValue>(m.canonical).number, 100.0);
  EXPECT_EQ(std::get<QuantityValue>(m.canonical).unit, "m");

  auto kg = normalize("-54 kilograms", ValueType::Quantity);
  EXPECT_EQ(std::get<QuantityValue>(kg.canonical).number, -54.0);
  EXPECT_EQ(std::get<QuantityValue>(kg.canonical).unit, "kilograms");

  auto comp = normalize("71 kg/m² (14.5 lb/ft²)", ValueType::Quantity);
  EXPECT_EQ(std::get<QuantityValue>(comp.canonical).number, 71.0);
  EXPECT_EQ(std::get<QuantityValue>(comp.canonical).unit, "kg/m²");
}

TEST(Types, EnDashYearRange) {
  EXPECT_EQ(normalize("1998–99", ValueType::DateTime).render(), "[1998,1999]");
  EXPECT_EQ(normalize("1998–2001", ValueType::DateTime).render(), "[1998,2001]");
}

TEST(Types, DateFormats) {
  for (const char* s : {"5 October 1987", "October 5, 1987", "1987-10-05", "05/10/1987"}) {
    auto v = normalize(s, ValueType::DateTime);
    ASSERT_TRUE(std::holds_alternative<DateValue>(v.canonical)) << s;
    EXPECT_EQ(std::get<DateValue>(v.canonical).iso, "1987-10-05") << s;
  }
  EXPECT_EQ(normalize("9:05", ValueType::DateTime).render(), "09:05:00");
}

TEST(Types, UnparseableFallsBackToString) {
  auto v = normalize("  about  forty ", ValueType::Quantity);
  EXPECT_EQ(v.type, ValueType::String);
  EXPECT_EQ(v.render(), "about forty");
  EXPECT_EQ(normalize("31 February 2001", ValueType::DateTime).type, ValueType::String);
}

TEST(Types, ClassifyCell) {
  EXPECT_EQ(classify_cell("5 October 1987", "date", false), ValueType::DateTime);
  EXPECT_EQ(classify_cell("100 m", "length", false), ValueType::Quantity);
  EXPECT_EQ(classify_cell("", "anything", false), ValueType::Other);
  EXPECT_EQ(classify_cell("n/a", "anything", false), ValueType::Other);
  EXPECT_EQ(classify_cell("Paris", "city", true), ValueType::Entity);
  EXPECT_EQ(classify_cell("1995", "year", false), ValueType::DateTime);
  EXPECT_EQ(classify_cell("1995", "seats", false), ValueType::Quantity);
  EXPECT_EQ(classify_cell("https://example.org/x", "site", false), ValueType::URL);
  EXPECT_EQ(classify_cell("Left-handed", "bats", false), ValueType::String);
}

TEST(Types, LinkedCellIsAlwaysEntity) {
  EXPECT_EQ(classify_cell("1987", "year", true), ValueType::Entity);
  EXPECT_EQ(classify_cell("", "x", true), ValueType::Entity);
}

TEST(Types, ColumnTypingMajorityAndTies) {
  std::vector<ColumnCell> q = {{"1 m"}, {"2 m"}, {"3 m"}, {"4 m"}, {"tall"}};
  EXPECT_EQ(detect_column_type(q, "height"), std::set<ValueType>{ValueType::Quantity});
  std::vector<ColumnCell> tie = {{"1 m"}, {"2 m"}, {"5 October 1987"}, {"1 May 2001"}};
  EXPECT_EQ(detect_column_type(tie, "x"), (std::set<ValueType>{ValueType::Quantity, ValueType::DateTime}));
  std::vector<ColumnCell> empty = {{""}, {"-"}};
  EXPECT_EQ(detect_column_type(empty, "x"), std::set<ValueType>{ValueType::Other});
}

TEST(Types, ValuesEqual) {
  auto m1 = NormalizedValue{ValueType::Quantity, QuantityValue{100, "m"}};
  auto m2 = NormalizedValue{ValueType::Quantity, QuantityValue{100, "M"}};
  auto km = NormalizedValue{ValueType::Quantity, QuantityValue{100, "km"}};
  EXPECT_TRUE(values_equal(m1, m2));
  EXPECT_FALSE(values_equal(m1, km));
  auto date = normalize("1982-10-16", ValueType::DateTime);
  auto year = normalize("1982", ValueType::String);
  EXPECT_FALSE(values_equal(date, year));
  auto range = normalize("1998--99", ValueType::DateTime);
  auto single = normalize("1998", ValueType::DateTime);
  EXPECT_FALSE(values_equal(range, single));
}

TEST(Types, NormalizeIsIdempotentOnRendering) {
  struct Case {
    const char* raw;
    ValueType type;
  };
  for (auto [raw, type] : {Case{"1998--99", ValueType::DateTime}, Case{"5 October 1987", ValueType::DateTime},
                           Case{"-54 kilograms", ValueType::Quantity}, Case{"3,644,826", ValueType::Quantity},
                           Case{"12:30:05", ValueType::DateTime}, Case{"Left  handed", ValueType::String}}) {
    auto once = normalize(raw, type);
    auto twice = normalize(once.render(), type);
    EXPECT_TRUE(values_equal(once, twice)) << raw;
    EXPECT_EQ(once.render(), twice.render()) << raw;
  }
}

TEST(Types, KbObjects) {
  auto e = normalize_kb_object("<Ridley_Scott>", "director");
  EXPECT_EQ(e.type, ValueType::Entity);
  EXPECT_EQ(e.render(), "Ridley_Scott");
  auto lit = normalize_kb_object("Ridley Scott", "director");
  EXPECT_NE(lit.type, ValueType::Entity);
  auto hinted = normalize_kb_object("1979", "release", ValueType::Quantity);
  EXPECT_EQ(hinted.type, ValueType::Quantity);
}

TEST(Types, RuleTableExportsEveryRule) {
  auto j = nlohmann::json::parse(export_rules_json());
  EXPECT_EQ(j["rules"].size(), type_rules().size());
  for (const auto& r : type_rules()) {
    if (r.example.empty()) continue;
    if (r.type == ValueType::Other) {
      EXPECT_EQ(classify_cell(r.example, "x", false), ValueType::Other) << r.id;
      continue;
    }
    auto v = normalize(r.example, r.type);
    EXPECT_EQ(v.render(), r.example_canonical) << r.id;
  }
}

TEST(Types, HandLabeledColumnFixture) {
  auto s = cellac::test::score_typing_fixture(std::filesystem::path(CELLAC_TEST_DATA) / "typing_columns.json");
  EXPECT_EQ(s.columns, 50u);
  EXPECT_GE(s.accuracy(), 0.9);
}
