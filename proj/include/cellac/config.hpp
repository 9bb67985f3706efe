#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellac/embeddings.hpp"
#include "cellac/forest.hpp"
#include "json.hpp"

namespace cellac {

/// Paths, thresholds and hyperparameters shared by the CLI and the server.
/// Relative artifact paths resolve against `work`.
struct Config {
  std::filesystem::path work = "work";
  std::string corpus = "corpus.jsonl";
  std::string triples = "kb_triples.tsv";
  std::string labels = "kb_labels.tsv";
  std::string h2h = "stats_h2h.tsv";
  std::string h2p = "stats_h2p.tsv";
  std::string embeddings = "embeddings.txt";
  std::string tmatch = "tmatch.forest";
  std::string ltr = "ltr.forest";
  std::string testset = "testset.jsonl";
  std::string qrels = "qrels.tsv";

  double gamma = 0.5;
  double tau_ed = 0.8;
  double msje_threshold = 0.8;
  std::uint64_t seed = 1;
  ForestParams ltr_forest{.n_trees = 300};
  ForestParams tmatch_forest;
  EmbeddingParams embedding;

  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t k = 10;

  std::filesystem::path path(const std::string& file) const;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Config& c);
/// Keys absent from `j` keep their defaults; unknown keys and wrong types
/// throw ConfigError.
Config config_from_json(const nlohmann::json& j);
Config load_config(const std::filesystem::path& file);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

/// Every leaf key can be overridden by CELLAC_<KEY>, nested keys joined with
/// '_' and upper-cased: ltr.trees -> CELLAC_LTR_TREES. Unparseable values
/// throw ConfigError naming the variable.
Config apply_env_overrides(const Config& c, const EnvLookup& env);

/// One artifact of a work directory.
struct ArtifactSpec {
  std::string key;       // manifest key and config field
  std::string producer;  // CLI subcommand that writes it
};

const std::vector<ArtifactSpec>& artifact_specs();
std::string artifact_file(const Config& c, const std::string& key);

/// Raised when a command needs an artifact that has not been produced.
struct MissingArtifact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Absolute path of the artifact; throws MissingArtifact with a message
/// naming the subcommand that produces it.
std::filesystem::path require_artifact(const Config& c, const std::string& key);

/// First line of a text artifact without a leading "# ", used as its
/// version tag.
std::string artifact_version(const std::filesystem::path& file);

/// manifest.json in the work directory: per artifact its file, version
/// tag, producing command and parameters.
class Manifest {
 public:
  static Manifest load(const std::filesystem::path& work);
  void record(const std::string& key, const std::string& file, const std::string& version,
              const nlohmann::json& params);
  void save(const std::filesystem::path& work) const;
  const nlohmann::json& json() const { return doc_; }

  static constexpr const char* kFormat = "cellac-manifest v1";

 private:
  nlohmann::json doc_ = {{"format", kFormat}, {"artifacts", nlohmann::json::object()}};
};

}  // namespace cellac
