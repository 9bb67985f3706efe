#include "cellac/types.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <regex>

#include "cellac/text.hpp"
#include "json.hpp"

namespace cellac {

namespace {

const std::string kMonth =
    "(?:January|February|March|April|May|June|July|August|September|October|November|December|"
    "Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sept|Sep|Oct|Nov|Dec)\\.?";
const std::string kDmyNamed = "\\d{1,2}\\s+" + kMonth + "\\s+\\d{4}";
const std::string kMdyNamed = kMonth + "\\s+\\d{1,2},?\\s+\\d{4}";
const std::string kIso = "\\d{4}-\\d{2}-\\d{2}";
const std::string kSlash = "\\d{1,2}/\\d{1,2}/\\d{4}";
const std::string kAnyDate = "(?:" + kDmyNamed + "|" + kMdyNamed + "|" + kIso + "|" + kSlash + ")";
const std::string kRangeSep = "(?:\\s+to\\s+|\\s*(?:--|–|—)\\s*|\\s+-\\s+)";
const std::string kYearSep = "(?:\\s*(?:--|–|—|-)\\s*|\\s+to\\s+)";

enum class Canon {
  Placeholder,
  Verbatim,
  DateRange,
  YearRangeShort,
  YearRangeFull,
  Date,
  TimeHMS,
  TimeHM,
  Year,
  NumberUnit,
};

struct CompiledRule {
  TypeRule rule;
  Canon canon;
  std::regex re;
  bool needs_digit;
};

std::vector<CompiledRule> build_rules() {
  struct Spec {
    const char* id;
    std::string pattern;
    ValueType type;
    Canon canon;
    const char* canon_id;
    bool date_heading;
    bool needs_digit;
    const char* example;
    const char* example_canonical;
  };
  const std::vector<Spec> specs = {
      {"placeholder", "(?:-|–|—|n/a|\\?|none|unknown)", ValueType::Other, Canon::Placeholder, "empty", false, false,
       "n/a", ""},
      {"url", "(?:https?://|www\\.)\\S+", ValueType::URL, Canon::Verbatim, "verbatim", false, false,
       "https://example.org/page", "https://example.org/page"},
      {"geo_decimal", "[+-]?\\d{1,3}\\.\\d+\\s*,\\s*[+-]?\\d{1,3}\\.\\d+", ValueType::GeoCoordinate,
       Canon::Verbatim, "verbatim", false, true, "40.7128, -74.0060", "40.7128, -74.0060"},
      {"geo_dms", ".*\\d+(?:\\.\\d+)?°.*[NS].*\\d+(?:\\.\\d+)?°.*[EW].*", ValueType::GeoCoordinate,
       Canon::Verbatim, "verbatim", false, true, "51°30′N 0°7′W", "51°30′N 0°7′W"},
      {"date_range", "(" + kAnyDate + ")" + kRangeSep + "(" + kAnyDate + ")", ValueType::DateTime,
       Canon::DateRange, "date_range", false, true, "5 October 1987 to 30 December 1987",
       "[1987-10-05, 1987-12-30]"},
      {"date_range_bracket", "\\[\\s*(" + kIso + ")\\s*,\\s*(" + kIso + ")\\s*\\]", ValueType::DateTime,
       Canon::DateRange, "date_range", false, true, "[1987-10-05, 1987-12-30]", "[1987-10-05, 1987-12-30]"},
      {"year_range_short", "(\\d{4})" + kYearSep + "(\\d{2})", ValueType::DateTime, Canon::YearRangeShort,
       "year_range", false, true, "1998--99", "[1998,1999]"},
      {"year_range_full", "(\\d{4})" + kYearSep + "(\\d{4})", ValueType::DateTime, Canon::YearRangeFull,
       "year_range", false, true, "1998–2001", "[1998,2001]"},
      {"year_range_bracket", "\\[\\s*(\\d{4})\\s*,\\s*(\\d{4})\\s*\\]", ValueType::DateTime, Canon::YearRangeFull,
       "year_range", false, true, "[1998,1999]", "[1998,1999]"},
      {"date_dmy_named", kDmyNamed, ValueType::DateTime, Canon::Date, "date", false, true, "5 October 1987",
       "1987-10-05"},
      {"date_mdy_named", kMdyNamed, ValueType::DateTime, Canon::Date, "date", false, true, "October 5, 1987",
       "1987-10-05"},
      {"date_iso", kIso, ValueType::DateTime, Canon::Date, "date", false, true, "1987-10-05", "1987-10-05"},
      {"date_slash_dmy", kSlash, ValueType::DateTime, Canon::Date, "date", false, true, "05/10/1987",
       "1987-10-05"},
      {"time_hms", "(\\d{1,2}):(\\d{2}):(\\d{2})", ValueType::DateTime, Canon::TimeHMS, "time", false, true,
       "7:05:30", "07:05:30"},
      {"time_hm", "(\\d{1,2}):(\\d{2})", ValueType::DateTime, Canon::TimeHM, "time", false, true, "19:45",
       "19:45:00"},
      {"year", "(\\d{4})", ValueType::DateTime, Canon::Year, "year", true, true, "1987", "1987"},
      {"year_prefixed", "(\\d{4})\\b.*", ValueType::DateTime, Canon::Year, "year", true, true, "1987 (est.)",
       "1987"},
      {"quantity", "((?:\\+|-|−)?(?:\\d{1,3}(?:,\\d{3})+|\\d+)(?:\\.\\d+)?)(?:\\s*(%)|\\s+(.+))?",
       ValueType::Quantity, Canon::NumberUnit, "number_unit", false, true, "-54 kilograms", "-54 kilograms"},
  };
  std::vector<CompiledRule> out;
  out.reserve(specs.size());
  for (const auto& s : specs) {
    TypeRule r{s.id, s.pattern, s.type, s.canon_id, s.date_heading, s.example, s.example_canonical};
    out.push_back({std::move(r), s.canon, std::regex(s.pattern, std::regex::ECMAScript | std::regex::icase),
                   s.needs_digit});
  }
  return out;
}

const std::vector<CompiledRule>& compiled_rules() {
  static const std::vector<CompiledRule> rules = build_rules();
  return rules;
}

bool has_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int month_number(std::string_view name) {
  static const std::map<std::string, int> months = {
      {"jan", 1}, {"feb", 2}, {"mar", 3}, {"apr", 4}, {"may", 5}, {"jun", 6},
      {"jul", 7}, {"aug", 8}, {"sep", 9}, {"oct", 10}, {"nov", 11}, {"dec", 12}};
  auto key = ascii_lower(name.substr(0, 3));
  auto it = months.find(key);
  return it == months.end() ? 0 : it->second;
}

int days_in_month(int y, int m) {
  static const std::array<int, 12> days = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
  return days[static_cast<std::size_t>(m - 1)];
}

std::optional<std::string> make_iso(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) return std::nullopt;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return std::string(buf);
}

std::optional<std::string> parse_date(const std::string& s) {
  static const std::regex dmy("(\\d{1,2})\\s+(" + kMonth + ")\\s+(\\d{4})", std::regex::icase);
  static const std::regex mdy("(" + kMonth + ")\\s+(\\d{1,2}),?\\s+(\\d{4})", std::regex::icase);
  static const std::regex iso("(\\d{4})-(\\d{2})-(\\d{2})");
  static const std::regex slash("(\\d{1,2})/(\\d{1,2})/(\\d{4})");
  std::smatch m;
  if (std::regex_match(s, m, dmy)) return make_iso(std::stoi(m[3]), month_number(m[2].str()), std::stoi(m[1]));
  if (std::regex_match(s, m, mdy)) return make_iso(std::stoi(m[3]), month_number(m[1].str()), std::stoi(m[2]));
  if (std::regex_match(s, m, iso)) return make_iso(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]));
  if (std::regex_match(s, m, slash)) return make_iso(std::stoi(m[3]), std::stoi(m[2]), std::stoi(m[1]));
  return std::nullopt;
}

std::string clean_unit(std::string unit) {
  auto cut = unit.find_first_of("([;,");
  if (cut != std::string::npos) unit.resize(cut);
  return collapse_whitespace(unit);
}

std::optional<double> parse_number(std::string s) {
  std::string digits;
  // Unicode minus U+2212.
  if (s.rfind("−", 0) == 0) s = "-" + s.substr(3);
  for (char c : s) {
    if (c != ',' && c != '+') digits.push_back(c);
  }
  double v = 0.0;
  auto res = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<Canonical> canonicalize(const CompiledRule& rule, const std::smatch& m, const std::string& text) {
  switch (rule.canon) {
    case Canon::Placeholder:
      return TextValue{""};
    case Canon::Verbatim:
      return TextValue{collapse_whitespace(text)};
    case Canon::DateRange: {
      auto a = parse_date(trim(m[1].str()));
      auto b = parse_date(trim(m[2].str()));
      if (!a || !b) return std::nullopt;
      return DateRange{*a, *b};
    }
    case Canon::YearRangeShort: {
      int first = std::stoi(m[1]);
      int last = (first / 100) * 100 + std::stoi(m[2]);
      if (last < first) last += 100;
      return YearRange{first, last};
    }
    case Canon::YearRangeFull: {
      int first = std::stoi(m[1]);
      int last = std::stoi(m[2]);
      if (last < first) return std::nullopt;
      return YearRange{first, last};
    }
    case Canon::Date: {
      auto d = parse_date(m[0].str());
      if (!d) return std::nullopt;
      return DateValue{*d};
    }
    case Canon::TimeHMS:
    case Canon::TimeHM: {
      int h = std::stoi(m[1]);
      int mi = std::stoi(m[2]);
      int s = rule.canon == Canon::TimeHMS ? std::stoi(m[3]) : 0;
      if (h > 23 || mi > 59 || s > 59) return std::nullopt;
      char buf[40];
      std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", h, mi, s);
      return TimeValue{buf};
    }
    case Canon::Year:
      return TextValue{m[1].str()};
    case Canon::NumberUnit: {
      auto num = parse_number(m[1].str());
      if (!num) return std::nullopt;
      std::string unit;
      if (m[2].matched) {
        unit = "%";
      } else if (m[3].matched) {
        unit = clean_unit(m[3].str());
      }
      return QuantityValue{*num, unit};
    }
  }
  return std::nullopt;
}

NormalizedValue fallback_string(const std::string& t) {
  return NormalizedValue{ValueType::String, TextValue{collapse_whitespace(t)}};
}

// Prefix match for composite values: the match must end at a non-alphanumeric
// boundary.
bool prefix_match(const std::string& t, const std::regex& re, std::smatch& m) {
  if (!std::regex_search(t, m, re, std::regex_constants::match_continuous)) return false;
  auto end = static_cast<std::size_t>(m.length(0));
  if (end == 0) return false;
  if (end < t.size()) {
    char c = t[end];
    if (std::isalnum(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(ValueType t) {
  switch (t) {
    case ValueType::Entity: return "Entity";
    case ValueType::Quantity: return "Quantity";
    case ValueType::String: return "String";
    case ValueType::DateTime: return "DateTime";
    case ValueType::GeoCoordinate: return "GeoCoordinate";
    case ValueType::URL: return "URL";
    case ValueType::Other: return "Other";
  }
  return "Other";
}

std::optional<ValueType> value_type_from_string(std::string_view s) {
  for (auto t : {ValueType::Entity, ValueType::Quantity, ValueType::String, ValueType::DateTime,
                 ValueType::GeoCoordinate, ValueType::URL, ValueType::Other}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string NormalizedValue::render() const {
  struct Visitor {
    std::string operator()(const EntityRef& e) const { return e.id; }
    std::string operator()(const QuantityValue& q) const {
      auto n = format_number(q.number);
      return q.unit.empty() ? n : n + " " + q.unit;
    }
    std::string operator()(const DateValue& d) const { return d.iso; }
    std::string operator()(const TimeValue& t) const { return t.hms; }
    std::string operator()(const YearRange& r) const {
      return "[" + std::to_string(r.first) + "," + std::to_string(r.last) + "]";
    }
    std::string operator()(const DateRange& r) const { return "[" + r.first + ", " + r.last + "]"; }
    std::string operator()(const TextValue& t) const { return t.text; }
  };
  return std::visit(Visitor{}, canonical);
}

bool is_empty_text(std::string_view raw) {
  auto t = ascii_lower(trim(raw));
  static const std::array<std::string_view, 8> placeholders = {"", "-", "–", "—", "n/a", "?", "none", "unknown"};
  return std::find(placeholders.begin(), placeholders.end(), t) != placeholders.end();
}

bool heading_has_date_keyword(std::string_view heading) {
  static const std::array<std::string_view, 11> keywords = {"year",   "birth", "date",     "founded",
                                                            "created", "built", "born",     "died",
                                                            "established", "opened", "released"};
  auto h = ascii_lower(heading);
  return std::any_of(keywords.begin(), keywords.end(),
                     [&](std::string_view k) { return h.find(k) != std::string::npos; });
}

ValueType classify_cell(std::string_view raw, std::string_view heading, bool has_entity_link) {
  if (has_entity_link) return ValueType::Entity;
  std::string t = trim(raw);
  if (is_empty_text(t)) return ValueType::Other;
  const bool digits = has_digit(t);
  const bool date_heading = heading_has_date_keyword(heading);
  for (const auto& r : compiled_rules()) {
    if (r.needs_digit && !digits) continue;
    if (r.rule.requires_date_heading && !date_heading) continue;
    std::smatch m;
    if (std::regex_match(t, m, r.re) && canonicalize(r, m, t)) return r.rule.type;
  }
  return ValueType::String;
}

std::set<ValueType> detect_column_type(const std::vector<ColumnCell>& cells, std::string_view heading) {
  std::map<ValueType, std::size_t> counts;
  for (const auto& c : cells) {
    if (!c.has_entity_link && is_empty_text(c.raw)) continue;
    ++counts[classify_cell(c.raw, heading, c.has_entity_link)];
  }
  if (counts.empty()) return {ValueType::Other};
  std::size_t best = 0;
  for (const auto& [t, n] : counts) best = std::max(best, n);
  std::set<ValueType> out;
  for (const auto& [t, n] : counts)
    if (n == best) out.insert(t);
  return out;
}

double column_type_agreement(const std::vector<ColumnCell>& cells, std::string_view heading, ValueType type) {
  std::size_t total = 0, agree = 0;
  for (const auto& c : cells) {
    if (!c.has_entity_link && is_empty_text(c.raw)) continue;
    ++total;
    if (classify_cell(c.raw, heading, c.has_entity_link) == type) ++agree;
  }
  return total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total);
}

NormalizedValue normalize(std::string_view raw, ValueType type) {
  std::string t = trim(raw);
  switch (type) {
    case ValueType::Entity:
      return NormalizedValue{ValueType::Entity, EntityRef{t}};
    case ValueType::String:
      return fallback_string(t);
    case ValueType::Other:
    case ValueType::URL:
    case ValueType::GeoCoordinate:
      return NormalizedValue{type, TextValue{collapse_whitespace(t)}};
    case ValueType::Quantity:
    case ValueType::DateTime:
      break;
  }
  if (!has_digit(t)) return fallback_string(t);
  const auto& rules = compiled_rules();
  for (const auto& r : rules) {
    if (r.rule.type != type) continue;
    std::smatch m;
    if (std::regex_match(t, m, r.re)) {
      if (auto c = canonicalize(r, m, t)) return NormalizedValue{type, *c};
    }
  }
  // Composite values: keep the first parseable value.
  for (const auto& r : rules) {
    if (r.rule.type != type || r.canon == Canon::Verbatim) continue;
    std::smatch m;
    if (prefix_match(t, r.re, m)) {
      if (auto c = canonicalize(r, m, m[0].str())) return NormalizedValue{type, *c};
    }
  }
  return fallback_string(t);
}

NormalizedValue normalize_free(std::string_view raw, std::string_view heading) {
  if (is_empty_text(raw)) return NormalizedValue{ValueType::Other, TextValue{""}};
  return normalize(raw, classify_cell(raw, heading, false));
}

NormalizedValue normalize_kb_object(std::string_view object, std::string_view predicate_label,
                                    std::optional<ValueType> hint) {
  std::string t = trim(object);
  if (t.size() > 2 && t.front() == '<' && t.back() == '>') {
    return NormalizedValue{ValueType::Entity, EntityRef{t.substr(1, t.size() - 2)}};
  }
  if (hint && *hint != ValueType::Entity && *hint != ValueType::Other && !is_empty_text(t)) {
    return normalize(t, *hint);
  }
  return normalize_free(t, predicate_label);
}

bool values_equal(const NormalizedValue& a, const NormalizedValue& b) {
  if (a.type != b.type || a.canonical.index() != b.canonical.index()) return false;
  if (const auto* qa = std::get_if<QuantityValue>(&a.canonical)) {
    const auto& qb = std::get<QuantityValue>(b.canonical);
    if (ascii_lower(qa->unit) != ascii_lower(qb.unit)) return false;
    double diff = std::abs(qa->number - qb.number);
    double scale = std::max(std::abs(qa->number), std::abs(qb.number));
    return diff <= 1e-9 * scale;
  }
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, QuantityValue>) {
          return false;
        } else {
          return x == std::get<T>(b.canonical);
        }
      },
      a.canonical);
}

const std::vector<TypeRule>& type_rules() {
  static const std::vector<TypeRule> rules = [] {
    std::vector<TypeRule> out;
    for (const auto& r : compiled_rules()) out.push_back(r.rule);
    return out;
  }();
  return rules;
}

std::string export_rules_json() {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["date_heading_keywords"] = {"year", "birth", "date", "founded", "created", "built",
                                  "born", "died", "established", "opened", "released"};
  auto& arr = doc["rules"] = nlohmann::ordered_json::array();
  for (const auto& r : type_rules()) {
    arr.push_back({{"id", r.id},
                   {"pattern", r.pattern},
                   {"type", std::string(to_string(r.type))},
                   {"canonicalization", r.canonicalization},
                   {"requires_date_heading", r.requires_date_heading},
                   {"example", r.example},
                   {"example_canonical", r.example_canonical}});
  }
  return doc.dump(2);
}

}  // namespace cellac
