#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellac/config.hpp"
#include "cellac/corpus.hpp"
#include "cellac/embeddings.hpp"
#include "cellac/forest.hpp"
#include "cellac/heading_stats.hpp"
#include "cellac/kb.hpp"
#include "cellac/ranker.hpp"
#include "json.hpp"

namespace cellac {

/// One suggestion request. The input table travels inline; without one, a
/// two-column table holding just the target cell stands in for it.
struct SuggestRequest {
  std::optional<RelationalTable> table;
  std::optional<std::size_t> row;
  std::optional<std::string> entity;
  std::optional<std::size_t> column;
  std::optional<std::string> heading;
  std::size_t k = 10;
};

/// Bad request; `code` is machine-readable.
struct RequestError : std::invalid_argument {
  RequestError(std::string code, const std::string& message) : std::invalid_argument(message), code(std::move(code)) {}
  std::string code;
};

/// Parses the HTTP body schema: {"table"?, "row"|"entity", "column"|"heading", "k"?}.
SuggestRequest parse_suggest_request(const nlohmann::json& body, std::size_t default_k = 10);

enum class RankMethod { LTR, OTG, KB };
std::string to_string(RankMethod m);

struct SuggestResponse {
  std::string entity;
  std::string heading;
  RankMethod method = RankMethod::LTR;
  std::vector<RankedSuggestion> suggestions;
};

/// Loaded artifacts. Embeddings and the two forests are optional.
struct Artifacts {
  Corpus corpus;
  KnowledgeBase kb;
  HeadingStats stats;
  std::optional<LabelEmbeddings> embeddings;
  std::optional<Forest> tmatch;
  std::optional<Forest> ltr;
  /// artifact key -> version tag
  std::map<std::string, std::string> versions;
};

/// Immutable snapshot answering suggestion requests; safe to share across
/// threads.
class Engine {
 public:
  Engine(Artifacts artifacts, Config config);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Loads everything present in the work directory. Corpus, KB and
  /// statistics are required; a ranker trained with group III also needs
  /// the table matcher. Throws MissingArtifact naming the producing command.
  static std::unique_ptr<Engine> load(const Config& config);
  static Artifacts load_artifacts(const Config& config);

  /// Learned ranker when loaded, else OTG.
  RankMethod default_method() const;
  /// Throws RequestError for invalid targets or an unavailable method.
  SuggestResponse suggest(const SuggestRequest& req, std::optional<RankMethod> method = std::nullopt) const;

  nlohmann::json to_json(const SuggestResponse& r) const;
  nlohmann::json health_json() const;
  nlohmann::json stats_json() const;

  const Artifacts& artifacts() const { return *artifacts_; }
  const Config& config() const { return config_; }

 private:
  std::unique_ptr<Artifacts> artifacts_;
  Config config_;
  std::unique_ptr<RankContext> ctx_;
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cellac
