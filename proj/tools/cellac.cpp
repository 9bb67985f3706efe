// Command-line front end: builds the artifacts of a work directory, ranks
// suggestions and evaluates runs.

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "cellac/config.hpp"
#include "cellac/engine.hpp"
#include "cellac/eval.hpp"
#include "cellac/experiment.hpp"
#include "cellac/heading_stats.hpp"
#include "cellac/server.hpp"
#include "cellac/synthetic.hpp"
#include "cellac/table_match.hpp"
#include "cellac/text.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace cellac;
using nlohmann::json;

namespace {

constexpr const char* kCorpusHeader = "# cellac-corpus v1";
constexpr const char* kTriplesHeader = "# cellac-kb-triples v1";
constexpr const char* kLabelsHeader = "# cellac-kb-labels v1";
constexpr const char* kQrelsHeader = "# cellac-qrels v1";
constexpr const char* kRunHeader = "# cellac-run v1";
// World seed of the reference benchmark.
constexpr std::uint64_t kBenchmarkSeed = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes through a temporary file so a failed command never leaves a
// half-written artifact behind.
template <typename F>
void write_file(const fs::path& path, F&& body) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }
  fs::rename(tmp, path);
}

void copy_with_header(const fs::path& from, const fs::path& to, const char* header) {
  std::ifstream in(from);
  if (!in) throw std::runtime_error("cannot open " + from.string());
  write_file(to, [&](std::ostream& out) {
    out << header << '\n';
    std::string line;
    while (std::getline(in, line))
      if (line.rfind(header, 0) != 0) out << line << '\n';
  });
}

Corpus load_corpus(const Config& c) { return Corpus::ingest(require_artifact(c, "corpus")); }

KnowledgeBase load_kb(const Config& c) {
  return KnowledgeBase::load(require_artifact(c, "triples"), require_artifact(c, "labels"));
}

std::optional<TestCollection> load_testset(const Config& c) {
  auto p = c.path(c.testset);
  if (!fs::exists(p)) return std::nullopt;
  return read_testset(p);
}

std::vector<std::string> test_table_ids(const std::optional<TestCollection>& tc) {
  std::vector<std::string> ids;
  if (tc)
    for (const auto& t : tc->input_tables) ids.push_back(t.id);
  return ids;
}

// Training commands see the corpus without test tables, so nothing concealed
// leaks into statistics or models.
Corpus training_corpus(const Config& c, std::size_t* excluded = nullptr) {
  auto corpus = load_corpus(c);
  const auto ids = test_table_ids(load_testset(c));
  if (excluded) *excluded = ids.size();
  return ids.empty() ? corpus : corpus.without(ids);
}

void record(const Config& c, const std::string& key, const json& params) {
  auto m = Manifest::load(c.work);
  const auto file = artifact_file(c, key);
  m.record(key, file, artifact_version(c.path(file)), params);
  m.save(c.work);
}

std::optional<RankMethod> parse_method(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "ltr") return RankMethod::LTR;
  if (s == "otg") return RankMethod::OTG;
  if (s == "kb") return RankMethod::KB;
  throw UsageError("unknown method `" + s + "` (ltr, otg, kb)");
}

FeatureSet parse_groups(const std::string& s) {
  if (s == "I") return {false, false};
  if (s == "I+II") return {true, false};
  if (s == "I+II+III") return {true, true};
  throw UsageError("unknown feature groups `" + s + "` (I, I+II, I+II+III)");
}

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(p.string() + ": " + e.what());
  }
}

void print_suggestions(std::ostream& out, const SuggestResponse& r) {
  out << "# " << r.entity << " / " << r.heading << " (" << to_string(r.method) << ")\n";
  for (const auto& s : r.suggestions)
    out << s.rank << '\t' << format_number(s.score) << '\t' << s.candidate.canonical() << '\t'
        << provenance_summary(s.candidate) << '\n';
}

// ---- commands ----

struct Globals {
  std::string config_file;
  std::string work;
  std::optional<std::uint64_t> seed;

  Config resolve() const {
    Config c = config_file.empty() ? Config{} : load_config(config_file);
    c = apply_env_overrides(c, process_env());
    if (!work.empty()) c.work = work;
    if (seed) c.seed = *seed;
    return c;
  }
};

struct IngestOpts {
  std::string corpus, triples, labels;
};

int cmd_ingest(const Config& c, const IngestOpts& o) {
  auto corpus = Corpus::ingest(o.corpus);
  if (corpus.size() == 0) throw std::runtime_error("no valid tables in " + o.corpus);
  const auto kb = KnowledgeBase::load(o.triples, o.labels);
  write_file(c.path(c.corpus), [&](std::ostream& out) {
    out << kCorpusHeader << '\n';
    corpus.write_jsonl(out);
  });
  copy_with_header(o.triples, c.path(c.triples), kTriplesHeader);
  copy_with_header(o.labels, c.path(c.labels), kLabelsHeader);
  const json params = {{"source", o.corpus}, {"tables", corpus.size()}, {"skipped", corpus.skipped_count()}};
  record(c, "corpus", params);
  record(c, "triples", {{"source", o.triples}, {"triples", kb.triple_count()}, {"skipped", kb.skipped_count()}});
  record(c, "labels", {{"source", o.labels}});
  std::cout << "ingested " << corpus.size() << " tables (" << corpus.skipped_count() << " skipped), "
            << kb.triple_count() << " triples (" << kb.skipped_count() << " skipped)\n";
  return 0;
}

int cmd_build_stats(const Config& c) {
  std::size_t excluded = 0;
  const auto corpus = training_corpus(c, &excluded);
  const auto kb = load_kb(c);
  const auto stats = HeadingStats::build(corpus, kb);
  write_file(c.path(c.h2h), [&](std::ostream& out) { stats.save_h2h(out); });
  write_file(c.path(c.h2p), [&](std::ostream& out) { stats.save_h2p(out); });
  const json params = {{"tables", corpus.size()}, {"excluded_test_tables", excluded}};
  record(c, "h2h", params);
  record(c, "h2p", params);
  std::cout << "heading statistics: " << stats.h2h().size() << " headings with heading matches, "
            << stats.h2p().size() << " with predicate matches\n";
  return 0;
}

int cmd_train_embeddings(const Config& c) {
  const auto corpus = training_corpus(c);
  auto p = c.embedding;
  p.seed = c.seed;
  const auto emb = LabelEmbeddings::train(corpus, p);
  write_file(c.path(c.embeddings), [&](std::ostream& out) { emb.save(out); });
  record(c, "embeddings", {{"dim", p.dim}, {"epochs", p.epochs}, {"negatives", p.negatives}, {"seed", p.seed}});
  std::cout << "embedded " << emb.size() << " heading labels (dim " << emb.dim() << ")\n";
  return 0;
}

int cmd_train_tmatch(const Config& c, const std::string& pairs_file) {
  const auto corpus = training_corpus(c);
  std::vector<GradedPair> pairs;
  std::size_t dropped = 0;
  for (const auto& p : read_graded_pairs(fs::path(pairs_file))) {
    if (corpus.find(p.input_id) && corpus.find(p.candidate_id))
      pairs.push_back(p);
    else
      ++dropped;
  }
  if (pairs.empty()) throw std::runtime_error("no graded pair refers to two corpus tables");
  auto params = c.tmatch_forest;
  params.seed = c.seed;
  TableMatchConfig tm;
  tm.msje_threshold = c.msje_threshold;
  const auto model = train_tmatch(pairs, corpus, params, tm);
  write_file(c.path(c.tmatch), [&](std::ostream& out) { model.save(out); });
  record(c, "tmatch", {{"pairs", pairs.size()}, {"dropped", dropped}, {"trees", params.n_trees}, {"seed", params.seed}});
  std::cout << "table matcher trained on " << pairs.size() << " pairs (" << dropped
            << " dropped: unknown or test tables)\n";
  return 0;
}

struct TrainLtrOpts {
  std::size_t per_type = 10;
  std::size_t cells = 5;
  std::string groups = "I+II+III";
};

int cmd_train_ltr(const Config& c, const TrainLtrOpts& o) {
  const auto set = parse_groups(o.groups);
  const auto corpus = training_corpus(c);
  const auto kb = load_kb(c);
  const auto stats = HeadingStats::load(require_artifact(c, "h2h"), require_artifact(c, "h2p"));
  const auto emb = LabelEmbeddings::load(require_artifact(c, "embeddings"));
  std::optional<Forest> tmatch;
  if (set.group3) tmatch = Forest::load(require_artifact(c, "tmatch"));
  TableMatchConfig tm;
  tm.msje_threshold = c.msje_threshold;
  CandidateConfig cand;
  cand.tau_ed = c.tau_ed;
  const RankContext ctx(corpus, kb, stats, &emb, tmatch ? &*tmatch : nullptr, tm, cand);

  // Training cells are sampled like test cells; their own table is skipped
  // as evidence, and the original value (or Empty) is the label.
  const auto tc = build_test_collection(corpus, o.per_type, o.cells, c.seed + 1);
  const auto truths = truths_from_originals(tc);
  std::vector<CellFeatures> cells;
  for (const auto& cell : tc.cells) {
    const auto input = conceal(tc.input_table(cell), cell);
    CellScorer scorer(ctx, make_target(input, cell.row, cell.col));
    cells.push_back(extract_cell_features(scorer, truths.at(cell.cell_id)));
  }
  std::vector<const CellFeatures*> ptrs;
  for (const auto& f : cells) ptrs.push_back(&f);
  auto params = c.ltr_forest;
  params.seed = c.seed;
  const auto model = train_ltr(ptrs, set, params);
  write_file(c.path(c.ltr), [&](std::ostream& out) { model.save(out); });
  record(c, "ltr", {{"cells", cells.size()}, {"groups", o.groups}, {"trees", params.n_trees}, {"seed", params.seed}});
  std::cout << "ranker (" << o.groups << ") trained on " << cells.size() << " cells\n";
  auto imp = model.named_importance();
  std::stable_sort(imp.begin(), imp.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; i < std::min<std::size_t>(10, imp.size()); ++i)
    std::cout << "  " << std::left << std::setw(28) << imp[i].first << std::fixed << std::setprecision(4)
              << imp[i].second << '\n';
  return 0;
}

struct TestsetOpts {
  std::size_t per_type = 50;
  std::size_t cells = 5;
};

int cmd_make_testset(const Config& c, const TestsetOpts& o) {
  const auto corpus = load_corpus(c);
  const auto tc = build_test_collection(corpus, o.per_type, o.cells, c.seed);
  write_file(c.path(c.testset), [&](std::ostream& out) { write_testset(out, tc); });
  write_file(c.path(c.qrels), [&](std::ostream& out) {
    out << kQrelsHeader << '\n';
    write_qrels(out, qrels_from_originals(tc));
  });
  const json params = {{"per_type", o.per_type}, {"cells_per_column", o.cells}, {"seed", c.seed}};
  record(c, "testset", params);
  record(c, "qrels", params);
  std::cout << "test set: " << tc.cells.size() << " cells from " << tc.input_tables.size() << " tables\n";
  if (fs::exists(c.path(c.h2h)))
    std::cerr << "note: statistics predate this test set; rerun build-stats and the train-* commands so they "
                 "exclude the test tables\n";
  return 0;
}

struct SuggestOpts {
  std::string table, entity, heading, method, requests, out;
  std::optional<std::size_t> row, column, k;
  bool json = false;
  bool testset = false;
};

int cmd_suggest(const Config& c, const SuggestOpts& o) {
  const auto method = parse_method(o.method);
  const std::size_t k = o.k.value_or(c.k);

  if (o.testset) {
    auto tc = load_testset(c);
    if (!tc) throw MissingArtifact("missing testset artifact; run `cellac make-testset --work " + c.work.string() +
                                   "` first");
    auto artifacts = Engine::load_artifacts(c);
    artifacts.corpus = artifacts.corpus.without(test_table_ids(tc));
    const Engine engine(std::move(artifacts), c);
    const fs::path out_path = o.out.empty() ? c.work / "run.tsv" : fs::path(o.out);
    write_file(out_path, [&](std::ostream& out) {
      out << kRunHeader << '\n';
      for (const auto& cell : tc->cells) {
        SuggestRequest req;
        req.table = conceal(tc->input_table(cell), cell);
        req.row = cell.row;
        req.column = cell.col;
        req.k = k;
        write_run(out, cell.cell_id, engine.suggest(req, method).suggestions);
      }
    });
    std::cout << "ranked " << tc->cells.size() << " cells -> " << out_path.string() << '\n';
    return 0;
  }

  const auto engine = Engine::load(c);
  if (!o.requests.empty()) {
    // One JSON request body per line in, one response body per line out.
    std::ifstream in(o.requests);
    if (!in) throw std::runtime_error("cannot open " + o.requests);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json reply;
      try {
        const auto req = parse_suggest_request(json::parse(line), k);
        reply = engine->to_json(engine->suggest(req, method));
      } catch (const json::parse_error& e) {
        reply = {{"error", {{"code", "malformed_body"}, {"message", e.what()}}}};
      } catch (const RequestError& e) {
        reply = {{"error", {{"code", e.code}, {"message", e.what()}}}};
      }
      std::cout << reply.dump() << '\n';
    }
    return 0;
  }

  json body = json::object();
  if (!o.table.empty()) body["table"] = read_json_file(o.table);
  if (o.row) body["row"] = *o.row;
  if (!o.entity.empty()) body["entity"] = o.entity;
  if (o.column) body["column"] = *o.column;
  if (!o.heading.empty()) body["heading"] = o.heading;
  body["k"] = k;
  SuggestRequest req;
  try {
    req = parse_suggest_request(body, k);
  } catch (const RequestError& e) {
    throw UsageError(e.what());
  }
  const auto r = engine->suggest(req, method);
  if (o.json)
    std::cout << engine->to_json(r).dump() << '\n';
  else
    print_suggestions(std::cout, r);
  return 0;
}

struct EvaluateOpts {
  std::string run, qrels;
  bool json = false;
};

int cmd_evaluate(const Config& c, const EvaluateOpts& o) {
  const fs::path qrels = o.qrels.empty() ? require_artifact(c, "qrels") : fs::path(o.qrels);
  const auto report = evaluate(read_run(fs::path(o.run)), read_qrels(qrels));
  const std::vector<std::pair<std::string, EvalReport>> rows = {{fs::path(o.run).filename().string(), report}};
  if (o.json)
    std::cout << report_json(rows) << '\n';
  else
    write_report_text(std::cout, rows);
  return 0;
}

Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Config& c) {
  const auto engine = Engine::load(c);
  Server server(*engine);
  const int port = server.bind(c.host, c.port);
  if (port < 0) throw std::runtime_error("cannot bind " + c.host + ":" + std::to_string(c.port));
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << c.host << ':' << port << " (" << to_string(engine->default_method()) << ")"
            << std::endl;
  server.listen();
  g_server = nullptr;
  return 0;
}

struct SynthOpts {
  std::string out;
  SyntheticParams params;
};

int cmd_synth(const Config& c, SynthOpts o) {
  o.params.seed = c.seed;
  const auto world = generate_world(o.params);
  world.write(o.out);
  std::cout << "wrote " << world.tables.size() << " tables, " << world.triples.size() << " triples, "
            << world.tmatch_pairs.size() << " graded pairs to " << o.out << '\n';
  return 0;
}

struct BenchOpts {
  std::size_t per_type = 20;
  std::size_t cells = 5;
  std::string json_out;
  bool no_tc_grid = false;
  SyntheticParams params;
};

int cmd_benchmark(const Config& c, BenchOpts o) {
  o.params.seed = c.seed;
  BenchmarkConfig cfg;
  cfg.ltr = c.ltr_forest;
  cfg.tmatch = c.tmatch_forest;
  cfg.embeddings = c.embedding;
  cfg.table_match.msje_threshold = c.msje_threshold;
  cfg.candidates.tau_ed = c.tau_ed;
  cfg.tc_grid = !o.no_tc_grid;
  const auto r = run_synthetic_benchmark(o.params, o.per_type, o.cells, cfg);
  std::vector<std::pair<std::string, EvalReport>> rows;
  for (const auto& m : r.methods) rows.emplace_back(m.name, m.report);
  std::cout << "cells " << r.stats.cells << ", avg correct values " << std::fixed << std::setprecision(2)
            << r.stats.avg_values << ", empty rate " << r.stats.empty_rate << ", tuned gamma ED " << r.gamma_ed
            << " MP " << r.gamma_mp << "\n\n";
  write_report_text(std::cout, rows);
  std::cout << "\nempty-cell NDCG@10:";
  for (const char* n : {kMethodOtg, kMethodLtrI, kMethodLtrII, kMethodLtrIII})
    std::cout << "  " << n << ' ' << std::setprecision(4) << r.empty_cell_ndcg10(n);
  std::cout << "\n\ntop features of " << kMethodLtrIII << ":\n";
  auto imp = r.importance;
  std::stable_sort(imp.begin(), imp.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; i < std::min<std::size_t>(10, imp.size()); ++i)
    std::cout << "  " << std::left << std::setw(28) << imp[i].first << imp[i].second << '\n';
  if (!o.json_out.empty()) write_file(o.json_out, [&](std::ostream& out) { out << report_json(rows) << '\n'; });
  return 0;
}

void add_world_options(CLI::App* sub, SyntheticParams& p) {
  sub->add_option("--topics", p.topics, "Topics")->capture_default_str();
  sub->add_option("--entities", p.entities_per_topic, "Entities per topic")->capture_default_str();
  sub->add_option("--tables", p.main_tables_per_topic, "Main tables per topic")->capture_default_str();
  sub->add_option("--distractors", p.distractor_tables_per_topic, "Distractor tables per topic")
      ->capture_default_str();
  sub->add_option("--table-noise", p.table_noise, "Share of wrong table values")->capture_default_str();
  sub->add_option("--table-junk", p.table_junk, "Share of filled cells whose truth is empty")
      ->capture_default_str();
  sub->add_option("--kb-noise", p.kb_noise, "Share of wrong KB values")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell auto-completion for relational tables"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("cellac ") + kVersion);

  Globals g;
  auto globals = [&](CLI::App* sub) {
    sub->add_option("--config", g.config_file, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--work", g.work, "Work directory (default from config, else ./work)");
    sub->add_option("--seed", g.seed, "Random seed");
  };

  IngestOpts ingest;
  auto* s_ingest = app.add_subcommand("ingest", "Normalize a table corpus and copy the KB into the work directory");
  globals(s_ingest);
  s_ingest->add_option("--corpus", ingest.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  s_ingest->add_option("--triples", ingest.triples, "KB triples TSV")->required()->check(CLI::ExistingFile);
  s_ingest->add_option("--labels", ingest.labels, "Predicate labels TSV")->required()->check(CLI::ExistingFile);

  auto* s_stats = app.add_subcommand("build-stats", "Count heading-to-heading and heading-to-predicate matches");
  globals(s_stats);

  auto* s_emb = app.add_subcommand("train-embeddings", "Train heading-label embeddings");
  globals(s_emb);

  std::string pairs;
  auto* s_tm = app.add_subcommand("train-tmatch", "Train the table matcher on graded table pairs");
  globals(s_tm);
  s_tm->add_option("--pairs", pairs, "input<TAB>candidate<TAB>grade lines")->required()->check(CLI::ExistingFile);

  TrainLtrOpts ltr;
  auto* s_ltr = app.add_subcommand("train-ltr", "Train the value ranker");
  globals(s_ltr);
  s_ltr->add_option("--per-type", ltr.per_type, "Training columns per main type")->capture_default_str();
  s_ltr->add_option("--cells", ltr.cells, "Training cells per column")->capture_default_str();
  s_ltr->add_option("--groups", ltr.groups, "Feature groups: I, I+II or I+II+III")->capture_default_str();

  TestsetOpts ts;
  auto* s_ts = app.add_subcommand("make-testset", "Sample concealed test cells");
  globals(s_ts);
  s_ts->add_option("--per-type", ts.per_type, "Columns per main type")->capture_default_str();
  s_ts->add_option("--cells", ts.cells, "Cells per column")->capture_default_str();

  SuggestOpts sg;
  auto* s_sg = app.add_subcommand("suggest", "Rank candidate values for a cell");
  globals(s_sg);
  s_sg->add_option("--table", sg.table, "Input table (corpus record JSON)")->check(CLI::ExistingFile);
  s_sg->add_option("--row", sg.row, "Target row in --table");
  s_sg->add_option("--entity", sg.entity, "Target entity id");
  s_sg->add_option("--column", sg.column, "Target column in --table");
  s_sg->add_option("--heading", sg.heading, "Target heading");
  s_sg->add_option("--k", sg.k, "Number of suggestions")->check(CLI::PositiveNumber);
  s_sg->add_option("--method", sg.method, "ltr, otg or kb (default: ltr when trained, else otg)");
  s_sg->add_flag("--json", sg.json, "Print the HTTP response body");
  s_sg->add_option("--requests", sg.requests, "JSONL of request bodies; prints one response per line")
      ->check(CLI::ExistingFile);
  s_sg->add_flag("--testset", sg.testset, "Rank every cell of the work directory's test set into a run file");
  s_sg->add_option("--out", sg.out, "Run file for --testset (default <work>/run.tsv)");

  EvaluateOpts ev;
  auto* s_ev = app.add_subcommand("evaluate", "NDCG@5/10 of a run with Empty excluded and included");
  globals(s_ev);
  s_ev->add_option("--run", ev.run, "Run file")->required()->check(CLI::ExistingFile);
  s_ev->add_option("--qrels", ev.qrels, "Qrels file (default: the work directory's)");
  s_ev->add_flag("--json", ev.json, "Machine-readable summary");

  std::string host;
  std::optional<int> port;
  auto* s_srv = app.add_subcommand("serve", "HTTP service over the work directory's artifacts");
  globals(s_srv);
  s_srv->add_option("--host", host, "Bind address");
  s_srv->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));

  auto* s_rules = app.add_subcommand("rules", "Print the value typing and normalization rules as JSON");

  SynthOpts sy;
  auto* s_syn = app.add_subcommand("synth", "Generate a synthetic corpus, KB and graded table pairs");
  globals(s_syn);
  s_syn->add_option("--out", sy.out, "Output directory")->required();
  add_world_options(s_syn, sy.params);

  BenchOpts bo;
  auto* s_bench = app.add_subcommand("benchmark", "Run the value-finding grid on a synthetic world");
  globals(s_bench);
  s_bench->footer("The world seed is --seed, default 4.");
  s_bench->add_option("--per-type", bo.per_type, "Test columns per main type")->capture_default_str();
  s_bench->add_option("--cells", bo.cells, "Test cells per column")->capture_default_str();
  s_bench->add_option("--json", bo.json_out, "Also write the report as JSON");
  s_bench->add_flag("--no-tc-grid", bo.no_tc_grid, "Skip the table-corpus-only variants");
  add_world_options(s_bench, bo.params);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (s_rules->parsed()) {
      std::cout << export_rules_json() << '\n';
      return 0;
    }
    auto c = g.resolve();
    if (s_ingest->parsed()) return cmd_ingest(c, ingest);
    if (s_stats->parsed()) return cmd_build_stats(c);
    if (s_emb->parsed()) return cmd_train_embeddings(c);
    if (s_tm->parsed()) return cmd_train_tmatch(c, pairs);
    if (s_ltr->parsed()) return cmd_train_ltr(c, ltr);
    if (s_ts->parsed()) return cmd_make_testset(c, ts);
    if (s_sg->parsed()) return cmd_suggest(c, sg);
    if (s_ev->parsed()) return cmd_evaluate(c, ev);
    if (s_srv->parsed()) {
      if (!host.empty()) c.host = host;
      if (port) c.port = *port;
      return cmd_serve(c);
    }
    if (s_syn->parsed()) return cmd_synth(c, sy);
    if (s_bench->parsed()) {
      c.seed = g.seed.value_or(kBenchmarkSeed);
      return cmd_benchmark(c, bo);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
