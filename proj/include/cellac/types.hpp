#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cellac {

// Value data types. The first four are the "main" types used for test-set
// stratification.
enum class ValueType { Entity, Quantity, String, DateTime, GeoCoordinate, URL, Other };

std::string_view to_string(ValueType t);
std::optional<ValueType> value_type_from_string(std::string_view s);

struct EntityRef {
  std::string id;
  bool operator==(const EntityRef&) const = default;
};
struct QuantityValue {
  double number = 0.0;
  std::string unit;
};
/// "YYYY-MM-DD"
struct DateValue {
  std::string iso;
  bool operator==(const DateValue&) const = default;
};
/// "HH:MM:SS"
struct TimeValue {
  std::string hms;
  bool operator==(const TimeValue&) const = default;
};
struct YearRange {
  int first = 0;
  int last = 0;
  bool operator==(const YearRange&) const = default;
};
struct DateRange {
  std::string first;
  std::string last;
  bool operator==(const DateRange&) const = default;
};
struct TextValue {
  std::string text;
  bool operator==(const TextValue&) const = default;
};

using Canonical = std::variant<EntityRef, QuantityValue, DateValue, TimeValue, YearRange, DateRange, TextValue>;

struct NormalizedValue {
  ValueType type = ValueType::String;
  Canonical canonical = TextValue{};

  /// Canonical string form; normalize(render(), type) reproduces the value.
  std::string render() const;
};

/// Deterministic cell classification. Linked cells are always Entity.
ValueType classify_cell(std::string_view raw, std::string_view heading, bool has_entity_link);

struct ColumnCell {
  std::string_view raw;
  bool has_entity_link = false;
};

/// Majority vote over non-empty cells; ties yield several types (enum
/// order); an all-empty column yields {Other}.
std::set<ValueType> detect_column_type(const std::vector<ColumnCell>& cells, std::string_view heading);

/// Fraction of non-empty cells whose own classification equals `type`.
double column_type_agreement(const std::vector<ColumnCell>& cells, std::string_view heading, ValueType type);

/// Applies the rule table for `type`; unparseable input falls back to a
/// trimmed String canonical. Never throws.
NormalizedValue normalize(std::string_view raw, ValueType type);

/// Classify-then-normalize for a free-standing value (KB literal, run/qrels
/// file entry). `heading` feeds the date-keyword rule.
NormalizedValue normalize_free(std::string_view raw, std::string_view heading);

/// KB objects: "<id>" is an entity reference, anything else a literal. A
/// literal is normalized as `hint` when given (the type of the table value it
/// is compared with), else classified using the predicate label. A literal
/// never normalizes to Entity.
NormalizedValue normalize_kb_object(std::string_view object, std::string_view predicate_label,
                                    std::optional<ValueType> hint = std::nullopt);

/// Same type and canonical form. Quantities compare numbers with relative
/// tolerance 1e-9 and units case-insensitively; no unit conversion.
bool values_equal(const NormalizedValue& a, const NormalizedValue& b);

/// Trimmed text is empty or a placeholder ("-", "n/a", ...).
bool is_empty_text(std::string_view raw);

bool heading_has_date_keyword(std::string_view heading);

/// One row of the rule table.
struct TypeRule {
  std::string id;
  std::string pattern;  // ECMAScript regex, full match on trimmed text
  ValueType type;
  std::string canonicalization;
  bool requires_date_heading = false;
  std::string example;
  std::string example_canonical;
};

const std::vector<TypeRule>& type_rules();

/// Machine-readable dump of the rule table (JSON).
std::string export_rules_json();

}  // namespace cellac
