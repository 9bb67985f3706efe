#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <thread>

#include "cellac/config.hpp"
#include "cellac/engine.hpp"
#include "cellac/server.hpp"
#include "fixtures.hpp"
#include "httplib.h"

using namespace cellac;
using namespace cellac::test;
using nlohmann::json;

namespace {

std::unique_ptr<Engine> film_engine() {
  Artifacts a;
  a.corpus = film_corpus();
  a.kb = film_kb();
  a.stats = HeadingStats::build(a.corpus, a.kb);
  return std::make_unique<Engine>(std::move(a), Config{});
}

std::string request_code(const json& body) {
  try {
    parse_suggest_request(body);
  } catch (const RequestError& e) {
    return e.code;
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsRoundTripThroughJson) {
  Config c;
  auto back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(c.path("x.tsv"), std::filesystem::path("work") / "x.tsv");
  EXPECT_EQ(c.path("/abs/x.tsv"), std::filesystem::path("/abs/x.tsv"));
}

TEST(Config, PartialDocumentKeepsDefaults) {
  auto c = config_from_json(json::parse(R"({"gamma": 0.25, "ltr": {"trees": 7}, "server": {"port": 9000}})"));
  EXPECT_DOUBLE_EQ(c.gamma, 0.25);
  EXPECT_EQ(c.ltr_forest.n_trees, 7u);
  EXPECT_EQ(c.ltr_forest.max_depth, Config{}.ltr_forest.max_depth);
  EXPECT_EQ(c.port, 9000);
  EXPECT_EQ(c.host, "127.0.0.1");
}

TEST(Config, RejectsUnknownKeysAndWrongTypes) {
  EXPECT_THROW(config_from_json(json::parse(R"({"gamma_typo": 1})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"ltr": {"depth": 3}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"gamma": "high"})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"ltr": {"trees": -1}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"k": 0})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"([1])")), ConfigError);
}

TEST(Config, EnvironmentOverrides) {
  std::map<std::string, std::string> env = {
      {"CELLAC_LTR_TREES", "11"}, {"CELLAC_SERVER_PORT", "9123"}, {"CELLAC_PATHS_CORPUS", "other.jsonl"},
      {"CELLAC_GAMMA", "0.75"}, {"CELLAC_WORK", "/tmp/w"}};
  auto lookup = [&](const std::string& k) -> std::optional<std::string> {
    auto it = env.find(k);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  auto c = apply_env_overrides(Config{}, lookup);
  EXPECT_EQ(c.ltr_forest.n_trees, 11u);
  EXPECT_EQ(c.port, 9123);
  EXPECT_EQ(c.corpus, "other.jsonl");
  EXPECT_DOUBLE_EQ(c.gamma, 0.75);
  EXPECT_EQ(c.work, "/tmp/w");
  env["CELLAC_LTR_TREES"] = "many";
  EXPECT_THROW(apply_env_overrides(Config{}, lookup), ConfigError);
}

TEST(Config, MissingArtifactNamesProducer) {
  Config c;
  c.work = temp_dir("missing");
  try {
    require_artifact(c, "h2h");
    FAIL();
  } catch (const MissingArtifact& e) {
    EXPECT_NE(std::string(e.what()).find("cellac build-stats"), std::string::npos) << e.what();
  }
  std::filesystem::remove_all(c.work);
}

TEST(Config, ManifestRecordsArtifacts) {
  auto dir = temp_dir("manifest");
  Manifest m;
  m.record("h2h", "stats_h2h.tsv", "cellac h2h v1", {{"tables", 4}});
  m.save(dir);
  auto back = Manifest::load(dir);
  EXPECT_EQ(back.json()["artifacts"]["h2h"]["producer"], "build-stats");
  EXPECT_EQ(back.json()["format"], Manifest::kFormat);
  std::ofstream(dir / "v.txt") << "# cellac-corpus v1\n{}\n";
  EXPECT_EQ(artifact_version(dir / "v.txt"), "cellac-corpus v1");
  std::filesystem::remove_all(dir);
}

TEST(Engine, RequestValidation) {
  EXPECT_EQ(request_code(json::array()), "malformed_body");
  EXPECT_EQ(request_code({{"entity", "Heat"}, {"heading", "director"}, {"k", 0}}), "invalid_k");
  EXPECT_EQ(request_code({{"entity", "Heat"}, {"heading", "director"}, {"k", "5"}}), "invalid_k");
  EXPECT_EQ(request_code({{"entity", "Heat"}}), "invalid_target");
  EXPECT_EQ(request_code({{"entity", "Heat"}, {"row", 1}, {"heading", "x"}}), "invalid_target");
  EXPECT_EQ(request_code({{"row", 1}, {"heading", "x"}}), "invalid_target");
  EXPECT_EQ(request_code({{"entity", ""}, {"heading", "x"}}), "invalid_target");
  EXPECT_EQ(request_code({{"table", {{"headings", 3}}}, {"row", 0}, {"column", 1}}), "invalid_table");
  EXPECT_EQ(request_code({{"entity", "Heat"}, {"heading", "director"}}), "");
}

TEST(Engine, SuggestsByEntityAndHeading) {
  auto engine = film_engine();
  EXPECT_EQ(engine->default_method(), RankMethod::OTG);
  auto r = engine->suggest(parse_suggest_request({{"entity", "Heat"}, {"heading", "Director"}}));
  ASSERT_GE(r.suggestions.size(), 2u);
  EXPECT_EQ(r.heading, "director");
  EXPECT_EQ(r.suggestions[0].candidate.canonical(), "Michael_Mann");
  EXPECT_TRUE(r.suggestions.back().candidate.is_empty);
  auto j = engine->to_json(r);
  EXPECT_EQ(j["method"], "otg");
  EXPECT_EQ(j["suggestions"][0]["value"], "<Michael_Mann>");
  EXPECT_FALSE(j["suggestions"][0]["evidence"].empty());
  EXPECT_EQ(j["suggestions"][0]["rank"], 1);
}

TEST(Engine, UnknownEntityYieldsEmpty) {
  auto engine = film_engine();
  auto r = engine->suggest(parse_suggest_request({{"entity", "Nobody"}, {"heading", "director"}}));
  ASSERT_EQ(r.suggestions.size(), 1u);
  EXPECT_TRUE(r.suggestions[0].candidate.is_empty);
}

TEST(Engine, InlineTableTargets) {
  auto engine = film_engine();
  auto table = table_json("mine", {"Film", "Director"}, {{"@Alien", "@Ridley_Scott"}, {"@Heat", ""}});
  auto by_index = engine->suggest(parse_suggest_request({{"table", table}, {"row", 1}, {"column", 1}, {"k", 1}}));
  ASSERT_EQ(by_index.suggestions.size(), 1u);
  EXPECT_EQ(by_index.suggestions[0].candidate.canonical(), "Michael_Mann");
  // A new row and a new column are appended when absent.
  auto grown = engine->suggest(parse_suggest_request({{"table", table}, {"entity", "Jaws"}, {"heading", "Year"}}));
  EXPECT_EQ(grown.entity, "Jaws");
  EXPECT_EQ(grown.suggestions[0].candidate.canonical(), "1975");
  EXPECT_THROW(engine->suggest(parse_suggest_request({{"table", table}, {"row", 1}, {"column", 0}})), RequestError);
  EXPECT_THROW(engine->suggest(parse_suggest_request({{"table", table}, {"row", 9}, {"column", 1}})), RequestError);
  EXPECT_THROW(engine->suggest(parse_suggest_request({{"entity", "Heat"}, {"heading", "director"}}), RankMethod::LTR),
               RequestError);
}

TEST(Engine, KbMethodAndStats) {
  auto engine = film_engine();
  auto r = engine->suggest(parse_suggest_request({{"entity", "Heat"}, {"heading", "director"}}), RankMethod::KB);
  EXPECT_EQ(to_string(r.method), "kb");
  auto s = engine->stats_json();
  EXPECT_EQ(s["corpus"]["tables"], 4);
  EXPECT_TRUE(s["ltr"].is_null());
  EXPECT_EQ(engine->health_json()["status"], "ok");
}

TEST(Server, HandlersMapErrorsToStatus) {
  auto engine = film_engine();
  EXPECT_EQ(handle_suggest(*engine, "{nope").status, 400);
  auto bad = handle_suggest(*engine, R"({"entity":"Heat","heading":"director","k":0})");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(json::parse(bad.body)["error"]["code"], "invalid_k");
  auto ok = handle_suggest(*engine, R"({"entity":"Heat","heading":"director"})");
  EXPECT_EQ(ok.status, 200);
  EXPECT_EQ(handle_health(*engine).status, 200);
  EXPECT_EQ(handle_stats(*engine).status, 200);
}

TEST(Server, ServesOverHttp) {
  auto engine = film_engine();
  Server server(*engine);
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen(); });
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  httplib::Result health;
  for (int i = 0; i < 50 && !(health = client.Get("/v1/health")); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body)["status"], "ok");
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");

  auto res = client.Post("/v1/suggest", R"({"entity":"Heat","heading":"director","k":2})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  auto body = json::parse(res->body);
  EXPECT_EQ(body["suggestions"].size(), 2u);
  EXPECT_EQ(body, engine->to_json(engine->suggest(parse_suggest_request(
                      {{"entity", "Heat"}, {"heading", "director"}, {"k", 2}}))));

  auto bad = client.Post("/v1/suggest", "[]", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(json::parse(bad->body)["error"]["code"], "malformed_body");

  auto stats = client.Get("/v1/stats");
  ASSERT_TRUE(stats);
  EXPECT_EQ(json::parse(stats->body)["kb"]["triples"], 9);
  server.stop();
  t.join();
}
