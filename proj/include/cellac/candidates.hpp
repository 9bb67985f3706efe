#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cellac/types.hpp"

namespace cellac {

class Corpus;
class KnowledgeBase;
class HeadingStats;
struct RelationalTable;

/// The cell being completed: entity e, heading h, and the input table T.
struct Target {
  std::string entity;
  std::string heading;
  /// Input table; may be absent from the corpus. Cells of a corpus table
  /// with the same id are never used as evidence.
  const RelationalTable* table = nullptr;
  /// Column of h in `table`, if any.
  std::optional<std::size_t> column;
  /// Row of e in `table`, if any.
  std::optional<std::size_t> row;
  /// Type used to normalize KB literals; derived from the target column.
  std::optional<ValueType> type_hint;
};

/// Builds a target for cell (row, col) of `table`. The row must have a
/// linked core-column entity; throws std::invalid_argument otherwise.
Target make_target(const RelationalTable& table, std::size_t row, std::size_t col);

/// Majority type of the column's other non-empty cells; none when unknown.
std::optional<ValueType> column_type_hint(const RelationalTable& table, std::size_t col,
                                          std::optional<std::size_t> skip_row);

struct TcEvidence {
  std::uint32_t table = 0;  // index into the corpus
  std::string table_id;
  std::string heading;      // h'
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::string raw;
};

struct KbEvidence {
  std::string predicate;
  std::string label;
  std::string raw;
};

struct Candidate {
  bool is_empty = false;
  NormalizedValue value;
  std::vector<TcEvidence> tc;
  std::vector<KbEvidence> kb;

  /// "EMPTY" for the sentinel, else the canonical rendering.
  std::string canonical() const;
  /// Raw text of the first evidence entry (KB first), or the canonical form.
  std::string display() const;
};

inline constexpr const char* kEmptyLiteral = "EMPTY";

struct CandidateConfig {
  /// Minimum edit similarity between a predicate label and h for the
  /// predicate to be admitted without a heading-to-predicate match.
  double tau_ed = 0.8;
};

/// Cells of e under h or any h' with n(h',h) > 0, one candidate per cell.
std::vector<Candidate> find_tc_candidates(const Target& target, const Corpus& corpus, const HeadingStats& stats);
/// Objects of e under predicates with n(h,p) > 0 or a label close to h, one
/// candidate per (predicate, object).
std::vector<Candidate> find_kb_candidates(const Target& target, const KnowledgeBase& kb, const HeadingStats& stats,
                                          const CandidateConfig& config = {});

/// Merges equal values (keeping all evidence), sorts by canonical form and
/// appends the Empty sentinel.
std::vector<Candidate> build_pool(std::vector<Candidate> tc, std::vector<Candidate> kb);

std::vector<Candidate> find_candidates(const Target& target, const Corpus& corpus, const KnowledgeBase& kb,
                                       const HeadingStats& stats, const CandidateConfig& config = {});

}  // namespace cellac
