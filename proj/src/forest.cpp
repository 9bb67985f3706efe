#include "cellac/forest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cellac/text.hpp"

namespace cellac {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<TrainingSample>& samples, const std::vector<std::size_t>& active,
              const ForestParams& params, std::size_t subsample, std::mt19937_64& rng, std::vector<double>& importance)
      : samples_(samples), active_(active), params_(params), subsample_(subsample), rng_(rng),
        importance_(importance) {}

  Forest::Tree build(std::vector<std::size_t> idx) {
    tree_.clear();
    grow(idx, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t>& idx, std::size_t depth) {
    const int id = static_cast<int>(tree_.size());
    tree_.push_back({});
    double sum = 0, sq = 0;
    for (auto i : idx) {
      sum += samples_[i].y;
      sq += samples_[i].y * samples_[i].y;
    }
    const double n = static_cast<double>(idx.size());
    tree_[id].value = sum / n;
    const double sse = sq - sum * sum / n;
    if (depth >= params_.max_depth || idx.size() < 2 * params_.min_leaf || sse <= 1e-12 || active_.empty())
      return id;

    std::vector<std::size_t> order = active_;
    std::shuffle(order.begin(), order.end(), rng_);
    Split best;
    for (std::size_t k = 0; k < order.size(); ++k) {
      // Keep looking past the subsample only while no valid split exists.
      if (k >= subsample_ && best.feature >= 0) break;
      consider(idx, order[k], sum, sq, best);
    }
    if (best.feature < 0) return id;

    importance_[static_cast<std::size_t>(best.feature)] += best.gain;
    std::vector<std::size_t> left, right;
    for (auto i : idx) (samples_[i].x[best.feature] <= best.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    tree_[id].feature = best.feature;
    tree_[id].threshold = best.threshold;
    const int l = grow(left, depth + 1);
    tree_[id].left = l;
    const int r = grow(right, depth + 1);
    tree_[id].right = r;
    return id;
  }

  void consider(const std::vector<std::size_t>& idx, std::size_t f, double sum, double sq, Split& best) {
    std::vector<std::pair<double, double>> xs;
    xs.reserve(idx.size());
    for (auto i : idx) xs.emplace_back(samples_[i].x[f], samples_[i].y);
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    const double parent = sq - sum * sum / n;
    double ls = 0, lq = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      ls += xs[i].second;
      lq += xs[i].second * xs[i].second;
      const std::size_t nl = i + 1;
      const std::size_t nr = xs.size() - nl;
      if (xs[i].first == xs[i + 1].first) continue;
      if (nl < params_.min_leaf || nr < params_.min_leaf) continue;
      const double rs = sum - ls, rq = sq - lq;
      const double child = (lq - ls * ls / double(nl)) + (rq - rs * rs / double(nr));
      const double gain = parent - child;
      if (gain > best.gain + 1e-12) {
        best.gain = gain;
        best.feature = static_cast<int>(f);
        best.threshold = xs[i].first + (xs[i + 1].first - xs[i].first) / 2.0;
        // Guard against the midpoint rounding up to the right value.
        if (!(best.threshold < xs[i + 1].first)) best.threshold = xs[i].first;
      }
    }
  }

  const std::vector<TrainingSample>& samples_;
  const std::vector<std::size_t>& active_;
  const ForestParams& params_;
  std::size_t subsample_;
  std::mt19937_64& rng_;
  std::vector<double>& importance_;
  Forest::Tree tree_;
};

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  double v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw std::runtime_error("bad number in model file");
  return v;
}

long long parse_int(std::string_view s) {
  long long v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw std::runtime_error("bad integer in model file");
  return v;
}

}  // namespace

Forest::Forest(std::vector<std::string> names, std::vector<Tree> trees, std::vector<double> importance,
               ForestParams params)
    : names_(std::move(names)), trees_(std::move(trees)), importance_(std::move(importance)), params_(params) {
  if (importance_.empty()) importance_.assign(names_.size(), 0.0);
  if (importance_.size() != names_.size()) throw std::invalid_argument("importance/schema size mismatch");
}

Forest Forest::fit(std::vector<std::string> names, std::vector<TrainingSample> samples, const ForestParams& params) {
  if (samples.empty()) throw std::invalid_argument("cannot fit a forest on an empty training set");
  if (params.n_trees == 0) throw std::invalid_argument("n_trees must be positive");
  const std::size_t d = names.size();
  for (const auto& s : samples) {
    if (s.x.size() != d) throw std::invalid_argument("training row width does not match feature schema");
    if (!std::isfinite(s.y)) throw std::invalid_argument("non-finite training target");
    for (double v : s.x)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
  }
  std::sort(samples.begin(), samples.end(), [](const TrainingSample& a, const TrainingSample& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });

  std::vector<std::size_t> active;
  for (std::size_t f = 0; f < d; ++f) {
    const double first = samples.front().x[f];
    for (const auto& s : samples)
      if (s.x[f] != first) {
        active.push_back(f);
        break;
      }
  }
  std::size_t subsample = params.feature_subsample;
  if (subsample == 0) subsample = (active.size() + 2) / 3;
  subsample = std::max<std::size_t>(1, std::min(subsample, std::max<std::size_t>(1, active.size())));

  std::vector<double> importance(d, 0.0);
  std::vector<Tree> trees;
  trees.reserve(params.n_trees);
  const std::size_t n = samples.size();
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    std::seed_seq seq{static_cast<std::uint32_t>(params.seed), static_cast<std::uint32_t>(params.seed >> 32),
                      static_cast<std::uint32_t>(t), 0x9e3779b9u};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = pick(rng);
    std::sort(idx.begin(), idx.end());
    TreeBuilder builder(samples, active, params, subsample, rng, importance);
    trees.push_back(builder.build(std::move(idx)));
  }
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (total > 0)
    for (auto& v : importance) v /= total;
  else
    std::fill(importance.begin(), importance.end(), 0.0);
  return Forest(std::move(names), std::move(trees), std::move(importance), params);
}

double Forest::predict(std::span<const double> x) const {
  if (x.size() != names_.size()) throw std::invalid_argument("feature vector width does not match model schema");
  if (trees_.empty()) return 0.0;
  double sum = 0;
  for (const auto& tree : trees_) {
    int node = 0;
    while (tree[node].feature >= 0)
      node = x[static_cast<std::size_t>(tree[node].feature)] <= tree[node].threshold ? tree[node].left
                                                                                      : tree[node].right;
    sum += tree[node].value;
  }
  return sum / static_cast<double>(trees_.size());
}

double Forest::predict(const FeatureVector& x) const {
  if (x.names != names_) throw std::invalid_argument("feature names do not match model schema");
  return predict(std::span<const double>(x.values));
}

std::vector<std::pair<std::string, double>> Forest::named_importance() const {
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < names_.size(); ++i) out.emplace_back(names_[i], importance_[i]);
  return out;
}

void Forest::save(std::ostream& out) const {
  out << "cellac-forest v1\n";
  out << "params " << params_.n_trees << ' ' << params_.max_depth << ' ' << params_.min_leaf << ' '
      << params_.feature_subsample << ' ' << params_.seed << '\n';
  out << "features " << names_.size() << '\n';
  for (std::size_t i = 0; i < names_.size(); ++i) out << names_[i] << '\t' << fmt(importance_[i]) << '\n';
  out << "trees " << trees_.size() << '\n';
  for (const auto& tree : trees_) {
    out << "tree " << tree.size() << '\n';
    for (const auto& nd : tree)
      out << nd.feature << ' ' << fmt(nd.threshold) << ' ' << nd.left << ' ' << nd.right << ' ' << fmt(nd.value)
          << '\n';
  }
}

void Forest::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  save(out);
}

Forest Forest::load(std::istream& in) {
  std::string line;
  auto next = [&]() -> std::string {
    if (!std::getline(in, line)) throw std::runtime_error("truncated model file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  if (next() != "cellac-forest v1") throw std::runtime_error("not a cellac forest model");
  auto words = [](const std::string& s) {
    std::vector<std::string> w;
    std::istringstream ss(s);
    for (std::string t; ss >> t;) w.push_back(t);
    return w;
  };
  auto p = words(next());
  if (p.size() != 6 || p[0] != "params") throw std::runtime_error("bad params line");
  ForestParams params;
  params.n_trees = static_cast<std::size_t>(parse_int(p[1]));
  params.max_depth = static_cast<std::size_t>(parse_int(p[2]));
  params.min_leaf = static_cast<std::size_t>(parse_int(p[3]));
  params.feature_subsample = static_cast<std::size_t>(parse_int(p[4]));
  {
    std::uint64_t seed = 0;
    auto r = std::from_chars(p[5].data(), p[5].data() + p[5].size(), seed);
    if (r.ec != std::errc{}) throw std::runtime_error("bad seed");
    params.seed = seed;
  }
  auto f = words(next());
  if (f.size() != 2 || f[0] != "features") throw std::runtime_error("bad features line");
  const auto nf = static_cast<std::size_t>(parse_int(f[1]));
  std::vector<std::string> names;
  std::vector<double> importance;
  for (std::size_t i = 0; i < nf; ++i) {
    auto parts = split(next(), '\t');
    if (parts.size() != 2) throw std::runtime_error("bad feature line");
    names.push_back(parts[0]);
    importance.push_back(parse_double(parts[1]));
  }
  auto t = words(next());
  if (t.size() != 2 || t[0] != "trees") throw std::runtime_error("bad trees line");
  const auto nt = static_cast<std::size_t>(parse_int(t[1]));
  std::vector<Tree> trees;
  for (std::size_t k = 0; k < nt; ++k) {
    auto h = words(next());
    if (h.size() != 2 || h[0] != "tree") throw std::runtime_error("bad tree header");
    const auto nn = static_cast<std::size_t>(parse_int(h[1]));
    Tree tree(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      auto w = words(next());
      if (w.size() != 5) throw std::runtime_error("bad node line");
      auto& nd = tree[i];
      nd.feature = static_cast<int>(parse_int(w[0]));
      nd.threshold = parse_double(w[1]);
      nd.left = static_cast<int>(parse_int(w[2]));
      nd.right = static_cast<int>(parse_int(w[3]));
      nd.value = parse_double(w[4]);
      const auto lim = static_cast<long long>(nn);
      if (nd.feature >= static_cast<int>(nf) ||
          (nd.feature >= 0 && (nd.left <= static_cast<int>(i) || nd.right <= static_cast<int>(i) || nd.left >= lim ||
                                nd.right >= lim)))
        throw std::runtime_error("node references out of range");
    }
    if (tree.empty()) throw std::runtime_error("empty tree");
    trees.push_back(std::move(tree));
  }
  return Forest(std::move(names), std::move(trees), std::move(importance), params);
}

Forest Forest::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  return load(in);
}

}  // namespace cellac
