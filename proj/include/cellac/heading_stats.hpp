#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cellac {

class Corpus;
class KnowledgeBase;

/// Co-occurrence counts between heading labels (two tables agree on an
/// entity's value under h' and h) and between headings and KB predicates.
class HeadingStats {
 public:
  using Counts = std::map<std::string, std::map<std::string, std::uint64_t>>;

  /// One increment per (entity, table pair, column pair) with equal non-empty
  /// values; n(h',h) and n(h,h') are both incremented unless h' == h.
  static Counts build_h2h(const Corpus& corpus);
  /// One increment per (non-core cell, predicate of the row entity) when any
  /// object of that predicate equals the cell value.
  static Counts build_h2p(const Corpus& corpus, const KnowledgeBase& kb);

  static HeadingStats build(const Corpus& corpus, const KnowledgeBase& kb);

  void set_h2h(Counts c);
  void set_h2p(Counts c);

  std::uint64_t n_h2h(std::string_view h_prime, std::string_view h) const;
  std::uint64_t n_h2p(std::string_view h, std::string_view p) const;
  /// P(h'|h); 0 when h has no counts.
  double p_h2h(std::string_view h_prime, std::string_view h) const;
  /// P(p|h); 0 when h has no counts.
  double p_p2h(std::string_view p, std::string_view h) const;

  /// h' -> n(h',h) for a target heading h.
  const std::map<std::string, std::uint64_t>& related_headings(std::string_view h) const;
  /// p -> n(h,p).
  const std::map<std::string, std::uint64_t>& related_predicates(std::string_view h) const;

  /// Keyed by target h: h2h()[h][h'] = n(h',h).
  const Counts& h2h() const { return h2h_; }
  /// h2p()[h][p] = n(h,p).
  const Counts& h2p() const { return h2p_; }

  void save_h2h(std::ostream& out) const;
  void save_h2p(std::ostream& out) const;
  /// Throws std::runtime_error on a bad header or malformed line.
  static Counts load_counts(std::istream& in, std::string_view expected_header);

  void save(const std::filesystem::path& h2h_file, const std::filesystem::path& h2p_file) const;
  static HeadingStats load(const std::filesystem::path& h2h_file, const std::filesystem::path& h2p_file);

  bool operator==(const HeadingStats& o) const { return h2h_ == o.h2h_ && h2p_ == o.h2p_; }

  static constexpr std::string_view kH2hHeader = "# cellac h2h v1";
  static constexpr std::string_view kH2pHeader = "# cellac h2p v1";

 private:
  static std::map<std::string, std::uint64_t> totals(const Counts& c);

  Counts h2h_;
  Counts h2p_;
  std::map<std::string, std::uint64_t> h2h_totals_;
  std::map<std::string, std::uint64_t> h2p_totals_;
};

}  // namespace cellac
