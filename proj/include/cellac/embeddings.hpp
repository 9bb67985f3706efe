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

struct EmbeddingParams {
  std::size_t dim = 64;
  std::size_t epochs = 15;
  std::size_t negatives = 5;
  std::size_t min_count = 2;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

/// Heading-label vectors trained with skip-gram and negative sampling; each
/// table's heading list is one sentence and the window spans the whole list.
class LabelEmbeddings {
 public:
  LabelEmbeddings() = default;
  LabelEmbeddings(std::size_t dim, std::map<std::string, std::vector<float>> vectors);

  /// Throws std::invalid_argument when fewer than two labels reach min_count.
  static LabelEmbeddings train(const std::vector<std::vector<std::string>>& sentences, const EmbeddingParams& params);
  static LabelEmbeddings train(const Corpus& corpus, const EmbeddingParams& params);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  bool contains(std::string_view label) const;
  const std::vector<float>* vector(std::string_view label) const;
  const std::map<std::string, std::vector<float>>& vectors() const { return vectors_; }

  /// Raw cosine in [-1, 1]; 0 if either label is out of vocabulary.
  double cosine(std::string_view a, std::string_view b) const;

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& file) const;
  /// Throws std::runtime_error on malformed input.
  static LabelEmbeddings load(std::istream& in);
  static LabelEmbeddings load(const std::filesystem::path& file);

 private:
  std::size_t dim_ = 0;
  std::map<std::string, std::vector<float>> vectors_;
};

/// Cosine clamped to [0, 1]; identical in-vocabulary labels give 1, OOV 0.
double l2v_sim(std::string_view h_prime, std::string_view h, const LabelEmbeddings& emb);

}  // namespace cellac
