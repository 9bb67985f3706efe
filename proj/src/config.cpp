#include "cellac/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>

namespace cellac {

namespace {

nlohmann::json forest_json(const ForestParams& p) {
  return {{"trees", p.n_trees},
          {"max_depth", p.max_depth},
          {"min_leaf", p.min_leaf},
          {"features", p.feature_subsample}};
}

void read_forest(const nlohmann::json& j, ForestParams& p) {
  p.n_trees = j.at("trees").get<std::size_t>();
  p.max_depth = j.at("max_depth").get<std::size_t>();
  p.min_leaf = j.at("min_leaf").get<std::size_t>();
  p.feature_subsample = j.at("features").get<std::size_t>();
}

// Overlays `patch` on `base`, rejecting keys `base` lacks and type changes.
void merge(nlohmann::json& base, const nlohmann::json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError("config " + (where.empty() ? "root" : where) + " must be an object");
  for (const auto& [key, value] : patch.items()) {
    const auto name = where.empty() ? key : where + "." + key;
    auto it = base.find(key);
    if (it == base.end()) throw ConfigError("unknown config key `" + name + "`");
    if (it->is_object()) {
      merge(*it, value, name);
      continue;
    }
    const bool ok = it->is_number() ? value.is_number() : it->type() == value.type();
    if (!ok) throw ConfigError("config key `" + name + "` has the wrong type");
    if (it->is_number_unsigned() && value.is_number_integer() && value.get<std::int64_t>() < 0)
      throw ConfigError("config key `" + name + "` must be non-negative");
    if (it->is_number_integer() && value.is_number_float())
      throw ConfigError("config key `" + name + "` must be an integer");
    *it = value;
  }
}

std::string env_name(const std::string& path) {
  std::string out = "CELLAC_";
  for (char c : path) out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void overlay_env(nlohmann::json& node, const std::string& path, const EnvLookup& env) {
  for (auto& [key, value] : node.items()) {
    const auto name = path.empty() ? key : path + "." + key;
    if (value.is_object()) {
      overlay_env(value, name, env);
      continue;
    }
    const auto var = env_name(name);
    auto raw = env(var);
    if (!raw) continue;
    const std::string& s = *raw;
    auto bad = [&] { return ConfigError("cannot parse " + var + "=" + s); };
    if (value.is_string()) {
      value = s;
    } else if (value.is_number_unsigned()) {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) throw bad();
      value = v;
    } else if (value.is_number_integer()) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) throw bad();
      value = v;
    } else if (value.is_number_float()) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (s.empty() || end != s.c_str() + s.size()) throw bad();
      value = v;
    }
  }
}

}  // namespace

std::filesystem::path Config::path(const std::string& file) const {
  std::filesystem::path p(file);
  return p.is_absolute() ? p : work / p;
}

nlohmann::json to_json(const Config& c) {
  return {{"work", c.work.string()},
          {"paths",
           {{"corpus", c.corpus},
            {"triples", c.triples},
            {"labels", c.labels},
            {"h2h", c.h2h},
            {"h2p", c.h2p},
            {"embeddings", c.embeddings},
            {"tmatch", c.tmatch},
            {"ltr", c.ltr},
            {"testset", c.testset},
            {"qrels", c.qrels}}},
          {"gamma", c.gamma},
          {"tau_ed", c.tau_ed},
          {"msje_threshold", c.msje_threshold},
          {"seed", c.seed},
          {"ltr", forest_json(c.ltr_forest)},
          {"tmatch", forest_json(c.tmatch_forest)},
          {"embeddings",
           {{"dim", c.embedding.dim},
            {"epochs", c.embedding.epochs},
            {"negatives", c.embedding.negatives},
            {"min_count", c.embedding.min_count},
            {"learning_rate", c.embedding.learning_rate}}},
          {"server", {{"host", c.host}, {"port", c.port}}},
          {"k", c.k}};
}

Config config_from_json(const nlohmann::json& j) {
  auto doc = to_json(Config{});
  merge(doc, j, "");
  Config c;
  c.work = doc["work"].get<std::string>();
  const auto& p = doc["paths"];
  c.corpus = p["corpus"];
  c.triples = p["triples"];
  c.labels = p["labels"];
  c.h2h = p["h2h"];
  c.h2p = p["h2p"];
  c.embeddings = p["embeddings"];
  c.tmatch = p["tmatch"];
  c.ltr = p["ltr"];
  c.testset = p["testset"];
  c.qrels = p["qrels"];
  c.gamma = doc["gamma"];
  c.tau_ed = doc["tau_ed"];
  c.msje_threshold = doc["msje_threshold"];
  c.seed = doc["seed"];
  read_forest(doc["ltr"], c.ltr_forest);
  read_forest(doc["tmatch"], c.tmatch_forest);
  const auto& e = doc["embeddings"];
  c.embedding.dim = e["dim"];
  c.embedding.epochs = e["epochs"];
  c.embedding.negatives = e["negatives"];
  c.embedding.min_count = e["min_count"];
  c.embedding.learning_rate = e["learning_rate"];
  c.host = doc["server"]["host"];
  c.port = doc["server"]["port"];
  c.k = doc["k"];
  if (c.k < 1) throw ConfigError("config key `k` must be at least 1");
  if (c.port < 0 || c.port > 65535) throw ConfigError("config key `server.port` out of range");
  return c;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + file.string() + ": " + e.what());
  }
  return config_from_json(j);
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

Config apply_env_overrides(const Config& c, const EnvLookup& env) {
  auto doc = to_json(c);
  overlay_env(doc, "", env);
  return config_from_json(doc);
}

const std::vector<ArtifactSpec>& artifact_specs() {
  static const std::vector<ArtifactSpec> specs = {
      {"corpus", "ingest"},   {"triples", "ingest"},         {"labels", "ingest"},
      {"h2h", "build-stats"}, {"h2p", "build-stats"},        {"embeddings", "train-embeddings"},
      {"tmatch", "train-tmatch"}, {"ltr", "train-ltr"},      {"testset", "make-testset"},
      {"qrels", "make-testset"}};
  return specs;
}

std::string artifact_file(const Config& c, const std::string& key) {
  const auto j = to_json(c)["paths"];
  auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument("unknown artifact `" + key + "`");
  return it->get<std::string>();
}

std::filesystem::path require_artifact(const Config& c, const std::string& key) {
  auto p = c.path(artifact_file(c, key));
  if (std::filesystem::exists(p)) return p;
  std::string producer = "?";
  for (const auto& s : artifact_specs())
    if (s.key == key) producer = s.producer;
  throw MissingArtifact("missing " + key + " artifact " + p.string() + "; run `cellac " + producer + " --work " +
                        c.work.string() + "` first");
}

std::string artifact_version(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::string line;
  if (!in || !std::getline(in, line)) return "";
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("# ", 0) == 0) line.erase(0, 2);
  return line;
}

Manifest Manifest::load(const std::filesystem::path& work) {
  Manifest m;
  std::ifstream in(work / "manifest.json");
  if (!in) return m;
  try {
    auto doc = nlohmann::json::parse(in);
    if (doc.value("format", "") != kFormat || !doc.contains("artifacts") || !doc["artifacts"].is_object())
      throw ConfigError("unsupported manifest in " + work.string());
    m.doc_ = std::move(doc);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("manifest in " + work.string() + ": " + e.what());
  }
  return m;
}

void Manifest::record(const std::string& key, const std::string& file, const std::string& version,
                      const nlohmann::json& params) {
  std::string producer;
  for (const auto& s : artifact_specs())
    if (s.key == key) producer = s.producer;
  doc_["artifacts"][key] = {{"file", file}, {"version", version}, {"producer", producer}, {"params", params}};
}

void Manifest::save(const std::filesystem::path& work) const {
  std::filesystem::create_directories(work);
  std::ofstream out(work / "manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + work.string());
  out << doc_.dump(2) << '\n';
}

}  // namespace cellac
