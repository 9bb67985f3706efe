#include "cellac/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cellac/corpus.hpp"
#include "cellac/text.hpp"

namespace cellac {

namespace {

double sigmoid(double x) {
  if (x > 30) return 1.0;
  if (x < -30) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

LabelEmbeddings::LabelEmbeddings(std::size_t dim, std::map<std::string, std::vector<float>> vectors)
    : dim_(dim), vectors_(std::move(vectors)) {
  for (const auto& [label, v] : vectors_)
    if (v.size() != dim_) throw std::invalid_argument("embedding dimension mismatch for " + label);
}

LabelEmbeddings LabelEmbeddings::train(const std::vector<std::vector<std::string>>& sentences,
                                       const EmbeddingParams& params) {
  if (params.dim == 0) throw std::invalid_argument("embedding dimension must be positive");
  std::map<std::string, std::size_t> freq;
  for (const auto& s : sentences)
    for (const auto& w : s) ++freq[w];
  std::vector<std::string> vocab;
  std::map<std::string, std::uint32_t> ids;
  for (const auto& [w, n] : freq) {
    if (n < params.min_count) continue;
    ids[w] = static_cast<std::uint32_t>(vocab.size());
    vocab.push_back(w);
  }
  if (vocab.size() < 2) throw std::invalid_argument("not enough heading labels to train embeddings");

  std::vector<std::vector<std::uint32_t>> corpus;
  for (const auto& s : sentences) {
    std::vector<std::uint32_t> ids_s;
    for (const auto& w : s)
      if (auto it = ids.find(w); it != ids.end()) ids_s.push_back(it->second);
    if (ids_s.size() >= 2) corpus.push_back(std::move(ids_s));
  }

  const std::size_t V = vocab.size();
  const std::size_t D = params.dim;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> init(-0.5 / static_cast<double>(D), 0.5 / static_cast<double>(D));
  std::vector<double> in(V * D), out(V * D, 0.0);
  for (auto& x : in) x = init(rng);

  // Unigram^0.75 noise distribution.
  std::vector<double> weights(V);
  for (std::size_t i = 0; i < V; ++i) weights[i] = std::pow(static_cast<double>(freq[vocab[i]]), 0.75);
  std::discrete_distribution<std::uint32_t> noise(weights.begin(), weights.end());

  std::size_t total_pairs = 0;
  for (const auto& s : corpus) total_pairs += s.size() * (s.size() - 1);
  const double total_steps = static_cast<double>(std::max<std::size_t>(1, total_pairs * params.epochs));
  double step = 0;
  std::vector<double> grad(D);

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    for (const auto& s : corpus) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = 0; j < s.size(); ++j) {
          if (i == j) continue;
          const double lr = std::max(params.learning_rate * 1e-4, params.learning_rate * (1.0 - step / total_steps));
          step += 1;
          const std::uint32_t center = s[i];
          double* vi = &in[center * D];
          std::fill(grad.begin(), grad.end(), 0.0);
          for (std::size_t n = 0; n <= params.negatives; ++n) {
            std::uint32_t target;
            double label;
            if (n == 0) {
              target = s[j];
              label = 1.0;
            } else {
              target = noise(rng);
              if (target == s[j]) continue;
              label = 0.0;
            }
            double* vo = &out[target * D];
            double dot = 0;
            for (std::size_t d = 0; d < D; ++d) dot += vi[d] * vo[d];
            const double g = (label - sigmoid(dot)) * lr;
            for (std::size_t d = 0; d < D; ++d) {
              grad[d] += g * vo[d];
              vo[d] += g * vi[d];
            }
          }
          for (std::size_t d = 0; d < D; ++d) vi[d] += grad[d];
        }
      }
    }
  }

  std::map<std::string, std::vector<float>> vectors;
  for (std::size_t i = 0; i < V; ++i) {
    std::vector<float> v(D);
    for (std::size_t d = 0; d < D; ++d) v[d] = static_cast<float>(in[i * D + d]);
    vectors.emplace(vocab[i], std::move(v));
  }
  return LabelEmbeddings(D, std::move(vectors));
}

LabelEmbeddings LabelEmbeddings::train(const Corpus& corpus, const EmbeddingParams& params) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(corpus.size());
  for (const auto& t : corpus.tables()) sentences.push_back(t.headings);
  return train(sentences, params);
}

bool LabelEmbeddings::contains(std::string_view label) const { return vectors_.count(std::string(label)) > 0; }

const std::vector<float>* LabelEmbeddings::vector(std::string_view label) const {
  auto it = vectors_.find(std::string(label));
  return it == vectors_.end() ? nullptr : &it->second;
}

double LabelEmbeddings::cosine(std::string_view a, std::string_view b) const {
  const auto* va = vector(a);
  const auto* vb = vector(b);
  if (!va || !vb) return 0.0;
  double dot = 0, na = 0, nb = 0;
  for (std::size_t d = 0; d < dim_; ++d) {
    dot += double((*va)[d]) * (*vb)[d];
    na += double((*va)[d]) * (*va)[d];
    nb += double((*vb)[d]) * (*vb)[d];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

double l2v_sim(std::string_view h_prime, std::string_view h, const LabelEmbeddings& emb) {
  if (!emb.contains(h_prime) || !emb.contains(h)) return 0.0;
  if (h_prime == h) return 1.0;
  return std::clamp(emb.cosine(h_prime, h), 0.0, 1.0);
}

void LabelEmbeddings::save(std::ostream& out) const {
  out << "# cellac-embeddings v1 dim=" << dim_ << " size=" << vectors_.size() << '\n';
  char buf[64];
  for (const auto& [label, v] : vectors_) {
    out << label;
    for (float x : v) {
      auto r = std::to_chars(buf, buf + sizeof buf, x);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf));
    }
    out << '\n';
  }
}

void LabelEmbeddings::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  save(out);
}

LabelEmbeddings LabelEmbeddings::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# cellac-embeddings v1 dim=", 0) != 0)
    throw std::runtime_error("not a cellac embeddings file");
  std::size_t dim = 0;
  {
    auto pos = line.find("dim=") + 4;
    auto r = std::from_chars(line.data() + pos, line.data() + line.size(), dim);
    if (r.ec != std::errc{} || dim == 0) throw std::runtime_error("bad embedding dimension");
  }
  std::map<std::string, std::vector<float>> vectors;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // Labels may contain spaces, so the numbers are read from the right.
    std::vector<float> v(dim);
    std::size_t end = line.size();
    for (std::size_t d = dim; d-- > 0;) {
      auto sp = line.rfind(' ', end - 1);
      if (sp == std::string::npos || sp == 0) throw std::runtime_error("short embedding line");
      auto r = std::from_chars(line.data() + sp + 1, line.data() + end, v[d]);
      if (r.ec != std::errc{} || r.ptr != line.data() + end || !std::isfinite(v[d]))
        throw std::runtime_error("bad embedding value");
      end = sp;
    }
    vectors[line.substr(0, end)] = std::move(v);
  }
  return LabelEmbeddings(dim, std::move(vectors));
}

LabelEmbeddings LabelEmbeddings::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return load(in);
}

}  // namespace cellac
