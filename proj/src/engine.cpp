#include "cellac/engine.hpp"

#include <filesystem>

#include "cellac/text.hpp"

namespace cellac {

namespace {

std::optional<std::size_t> index_field(const nlohmann::json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
    throw RequestError("invalid_target", std::string("`") + key + "` must be a non-negative integer");
  return it->get<std::size_t>();
}

std::optional<std::string> string_field(const nlohmann::json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string() || trim(it->get<std::string>()).empty())
    throw RequestError("invalid_target", std::string("`") + key + "` must be a non-empty string");
  return it->get<std::string>();
}

RelationalTable stand_in_table(const std::string& entity, const std::string& heading) {
  RelationalTable t;
  t.id = "request";
  t.headings = {"name", normalize_label(heading)};
  Cell e;
  e.text = entity;
  e.entity = entity;
  t.rows.push_back({e, Cell{}});
  t.core_column = 0;
  normalize_table(t);
  return t;
}

}  // namespace

SuggestRequest parse_suggest_request(const nlohmann::json& body, std::size_t default_k) {
  if (!body.is_object()) throw RequestError("malformed_body", "request body must be a JSON object");
  SuggestRequest r;
  r.k = default_k;
  if (auto it = body.find("k"); it != body.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 1)
      throw RequestError("invalid_k", "`k` must be an integer >= 1");
    r.k = it->get<std::size_t>();
  }
  if (auto it = body.find("table"); it != body.end() && !it->is_null()) {
    try {
      r.table = table_from_json(*it);
    } catch (const std::exception& e) {
      throw RequestError("invalid_table", std::string("bad `table`: ") + e.what());
    }
  }
  r.row = index_field(body, "row");
  r.entity = string_field(body, "entity");
  r.column = index_field(body, "column");
  r.heading = string_field(body, "heading");
  if (r.row.has_value() == r.entity.has_value())
    throw RequestError("invalid_target", "give exactly one of `row` and `entity`");
  if (r.column.has_value() == r.heading.has_value())
    throw RequestError("invalid_target", "give exactly one of `column` and `heading`");
  if (!r.table && (r.row || r.column))
    throw RequestError("invalid_target", "`row` and `column` need an inline `table`");
  return r;
}

std::string to_string(RankMethod m) {
  switch (m) {
    case RankMethod::LTR:
      return "ltr";
    case RankMethod::OTG:
      return "otg";
    case RankMethod::KB:
      return "kb";
  }
  return "?";
}

Engine::Engine(Artifacts artifacts, Config config)
    : artifacts_(std::make_unique<Artifacts>(std::move(artifacts))), config_(std::move(config)) {
  const auto& a = *artifacts_;
  if (a.ltr) {
    FeatureSet set;
    try {
      set = feature_set_of(*a.ltr);
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("ranker model does not have a value-ranking schema");
    }
    if (set.group3 && !a.tmatch)
      throw MissingArtifact("ranker uses table-matching features but no tmatch model is loaded; run `cellac "
                            "train-tmatch` first");
  }
  TableMatchConfig tm;
  tm.msje_threshold = config_.msje_threshold;
  CandidateConfig cand;
  cand.tau_ed = config_.tau_ed;
  ctx_ = std::make_unique<RankContext>(a.corpus, a.kb, a.stats, a.embeddings ? &*a.embeddings : nullptr,
                                       a.tmatch ? &*a.tmatch : nullptr, tm, cand);
}

std::unique_ptr<Engine> Engine::load(const Config& config) {
  return std::make_unique<Engine>(load_artifacts(config), config);
}

Artifacts Engine::load_artifacts(const Config& config) {
  Artifacts a;
  const auto corpus = require_artifact(config, "corpus");
  const auto triples = require_artifact(config, "triples");
  const auto labels = require_artifact(config, "labels");
  const auto h2h = require_artifact(config, "h2h");
  const auto h2p = require_artifact(config, "h2p");
  a.corpus = Corpus::ingest(corpus);
  a.kb = KnowledgeBase::load(triples, labels);
  a.stats = HeadingStats::load(h2h, h2p);
  a.versions["corpus"] = artifact_version(corpus);
  a.versions["kb"] = artifact_version(triples);
  a.versions["stats"] = artifact_version(h2h);
  if (auto p = config.path(config.embeddings); std::filesystem::exists(p)) {
    a.embeddings = LabelEmbeddings::load(p);
    a.versions["embeddings"] = artifact_version(p);
  }
  if (auto p = config.path(config.tmatch); std::filesystem::exists(p)) {
    a.tmatch = Forest::load(p);
    a.versions["tmatch"] = artifact_version(p);
  }
  if (auto p = config.path(config.ltr); std::filesystem::exists(p)) {
    a.ltr = Forest::load(p);
    a.versions["ltr"] = artifact_version(p);
  }
  return a;
}

RankMethod Engine::default_method() const { return artifacts_->ltr ? RankMethod::LTR : RankMethod::OTG; }

SuggestResponse Engine::suggest(const SuggestRequest& req, std::optional<RankMethod> method) const {
  if (req.k < 1) throw RequestError("invalid_k", "`k` must be at least 1");
  const RankMethod m = method.value_or(default_method());
  if (m == RankMethod::LTR && !artifacts_->ltr)
    throw RequestError("unavailable_method", "no ranker model loaded; run `cellac train-ltr` first");

  RelationalTable table;
  if (req.table) {
    table = *req.table;
  } else {
    if (!req.entity || !req.heading) throw RequestError("invalid_target", "without a table give `entity` and `heading`");
    table = stand_in_table(*req.entity, *req.heading);
  }

  bool grown = false;
  std::size_t row = 0;
  if (req.row) {
    if (*req.row >= table.num_rows()) throw RequestError("invalid_target", "`row` out of range");
    if (!table.core_entity(*req.row)) throw RequestError("invalid_target", "target row has no linked entity");
    row = *req.row;
  } else if (auto r = table.row_of(*req.entity)) {
    row = *r;
  } else {
    std::vector<Cell> cells(table.num_cols());
    cells[table.core_column].text = *req.entity;
    cells[table.core_column].entity = *req.entity;
    table.rows.push_back(std::move(cells));
    row = table.num_rows() - 1;
    grown = true;
  }

  std::size_t col = 0;
  if (req.column) {
    if (*req.column >= table.num_cols()) throw RequestError("invalid_target", "`column` out of range");
    col = *req.column;
  } else if (auto c = table.column_of(*req.heading)) {
    col = *c;
  } else {
    const auto h = normalize_label(*req.heading);
    if (h.empty()) throw RequestError("invalid_target", "`heading` is blank");
    table.headings.push_back(h);
    for (auto& r : table.rows) r.emplace_back();
    col = table.num_cols() - 1;
    grown = true;
  }
  if (col == table.core_column) throw RequestError("invalid_target", "target column is the entity column");
  if (grown) normalize_table(table);

  CellScorer cell(*ctx_, make_target(table, row, col));
  SuggestResponse out;
  out.entity = cell.target().entity;
  out.heading = cell.target().heading;
  out.method = m;
  switch (m) {
    case RankMethod::LTR:
      out.suggestions = ltr_rank(cell, *artifacts_->ltr);
      break;
    case RankMethod::OTG:
      out.suggestions = otg_rank(cell);
      break;
    case RankMethod::KB:
      out.suggestions = kb_rank(cell, KbVariant::MP, config_.gamma);
      break;
  }
  if (out.suggestions.size() > req.k) out.suggestions.resize(req.k);
  return out;
}

nlohmann::json Engine::to_json(const SuggestResponse& r) const {
  auto list = nlohmann::json::array();
  for (const auto& s : r.suggestions) {
    auto evidence = nlohmann::json::array();
    for (const auto& e : s.candidate.kb)
      evidence.push_back({{"source", "kb"}, {"predicate", e.predicate}, {"label", e.label}, {"text", e.raw}});
    for (const auto& e : s.candidate.tc)
      evidence.push_back({{"source", "table"},
                          {"table_id", e.table_id},
                          {"page_title", artifacts_->corpus.table(e.table).page_title},
                          {"heading", e.heading},
                          {"text", e.raw}});
    list.push_back({{"rank", s.rank},
                    {"value", s.candidate.display()},
                    {"canonical", s.candidate.canonical()},
                    {"score", s.score},
                    {"is_empty", s.candidate.is_empty},
                    {"evidence", std::move(evidence)}});
  }
  return {{"entity", r.entity}, {"heading", r.heading}, {"method", to_string(r.method)}, {"suggestions", list}};
}

nlohmann::json Engine::health_json() const {
  return {{"status", "ok"},
          {"version", kVersion},
          {"method", to_string(default_method())},
          {"artifacts", artifacts_->versions}};
}

nlohmann::json Engine::stats_json() const {
  const auto& a = *artifacts_;
  auto forest = [](const std::optional<Forest>& f) -> nlohmann::json {
    if (!f) return nullptr;
    return {{"trees", f->trees().size()}, {"features", f->names().size()}};
  };
  nlohmann::json j = {
      {"corpus",
       {{"tables", a.corpus.size()},
        {"skipped", a.corpus.skipped_count()},
        {"entities", a.corpus.index().by_entity.size()},
        {"headings", a.corpus.index().by_heading.size()}}},
      {"kb", {{"triples", a.kb.triple_count()}, {"entities", a.kb.entity_count()}, {"predicates", a.kb.predicates().size()}}},
      {"stats", {{"h2h_headings", a.stats.h2h().size()}, {"h2p_headings", a.stats.h2p().size()}}},
      {"embeddings", a.embeddings ? nlohmann::json{{"labels", a.embeddings->size()}, {"dim", a.embeddings->dim()}}
                                  : nlohmann::json(nullptr)},
      {"tmatch", forest(a.tmatch)},
      {"ltr", forest(a.ltr)},
      {"method", to_string(default_method())}};
  if (a.ltr) {
    const auto set = feature_set_of(*a.ltr);
    j["ltr"]["groups"] = set.group3 ? "I+II+III" : set.group2 ? "I+II" : "I";
  }
  return j;
}

}  // namespace cellac
