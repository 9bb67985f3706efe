#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cellac {

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
};

/// Subject-predicate-object store with human-readable predicate labels.
/// Objects are kept verbatim; "<id>" marks an entity object.
class KnowledgeBase {
 public:
  using EntityFilter = std::function<bool(const std::string&)>;

  KnowledgeBase() = default;

  /// Tab-separated `subject\tpredicate\tobject` triples and `predicate\tlabel`
  /// lines. Malformed lines are skipped and counted. Throws
  /// std::runtime_error if a file cannot be opened.
  static KnowledgeBase load(const std::filesystem::path& triples, const std::filesystem::path& labels,
                            const EntityFilter& keep_subject = {});
  static KnowledgeBase load_streams(std::istream& triples, std::istream& labels,
                                    const EntityFilter& keep_subject = {});

  void add(const Triple& t);
  /// First label wins.
  void set_label(const std::string& predicate, std::string_view label);

  /// Objects of <e, p, ?>; empty when absent.
  const std::vector<std::string>& lookup(std::string_view entity, std::string_view predicate) const;
  std::vector<std::string> predicates_of(std::string_view entity) const;
  bool has_entity(std::string_view entity) const;

  /// Label for human consumption (lowercased). Unlabeled predicates fall back
  /// to their camel-case-split local name.
  std::string label(std::string_view predicate) const;
  std::vector<std::string> predicates() const;

  std::size_t triple_count() const { return triples_; }
  std::size_t entity_count() const { return facts_.size(); }
  std::size_t skipped_count() const { return skipped_; }

  bool operator==(const KnowledgeBase& o) const { return facts_ == o.facts_ && labels_ == o.labels_; }

 private:
  std::map<std::string, std::map<std::string, std::vector<std::string>>> facts_;
  std::map<std::string, std::string> labels_;
  std::size_t triples_ = 0;
  std::size_t skipped_ = 0;
};

/// "dbp:timeZone" -> "time zone".
std::string default_predicate_label(std::string_view predicate);

}  // namespace cellac
