#include "cellac/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "cellac/eval.hpp"
#include "cellac/ranker.hpp"
#include "cellac/text.hpp"

namespace cellac {

namespace {

struct AttributeSpec {
  const char* name;
  ValueType type;
  std::vector<std::string> synonyms;  // first is the canonical heading
  const char* kb_label;
  const char* unit;
  int lo, hi;  // numeric range (quantities) or year range (dates)
};

const std::vector<AttributeSpec>& catalog() {
  static const std::vector<AttributeSpec> c = {
      {"population", ValueType::Quantity, {"population", "inhabitants", "pop. total"}, "population total", "", 500, 900000},
      {"elevation", ValueType::Quantity, {"elevation", "altitude", "height asl"}, "elevation", "m", 10, 4800},
      {"area", ValueType::Quantity, {"area", "surface area", "total area"}, "area total", "km2", 2, 9000},
      {"length", ValueType::Quantity, {"length", "total length", "span"}, "length", "km", 1, 3000},
      {"capacity", ValueType::Quantity, {"capacity", "seats", "seating capacity"}, "seating capacity", "", 200, 90000},
      {"weight", ValueType::Quantity, {"weight", "mass", "gross weight"}, "weight", "kg", 5, 40000},
      {"budget", ValueType::Quantity, {"budget", "cost", "total cost"}, "budget", "million", 1, 900},
      {"founded", ValueType::DateTime, {"founded", "established", "foundation date"}, "founding date", "", 1700, 2010},
      {"opened", ValueType::DateTime, {"opened", "opening date", "inaugurated"}, "opening date", "", 1850, 2015},
      {"released", ValueType::DateTime, {"released", "release date", "premiere"}, "release date", "", 1920, 2016},
      {"born", ValueType::DateTime, {"born", "date of birth", "birth date"}, "birth date", "", 1850, 2000},
      {"completed", ValueType::DateTime, {"completed", "completion date", "finished"}, "completion date", "", 1800, 2015},
      {"motto", ValueType::String, {"motto", "slogan", "tagline"}, "motto", "", 0, 0},
      {"status", ValueType::String, {"status", "current status", "condition"}, "status", "", 0, 0},
      {"genre", ValueType::String, {"genre", "style", "category"}, "genre", "", 0, 0},
      {"nickname", ValueType::String, {"nickname", "known as", "alias"}, "nickname", "", 0, 0},
      {"classification", ValueType::String, {"classification", "class", "rating"}, "classification", "", 0, 0},
      {"country", ValueType::Entity, {"country", "nation", "sovereign state"}, "country", "", 0, 0},
      {"director", ValueType::Entity, {"director", "directed by", "filmmaker"}, "director", "", 0, 0},
      {"architect", ValueType::Entity, {"architect", "designer", "designed by"}, "architect", "", 0, 0},
      {"owner", ValueType::Entity, {"owner", "owned by", "proprietor"}, "owner", "", 0, 0},
      {"league", ValueType::Entity, {"league", "division", "competition"}, "league", "", 0, 0},
  };
  return c;
}

const std::vector<std::string> kTopicNames = {"harbor towns", "river bridges", "film studios", "mountain huts",
                                              "rowing clubs", "observatories", "opera houses", "lighthouses"};
const std::vector<std::string> kSyllables = {"ka", "lo", "ve", "dra", "mi", "sen", "tor", "ul", "bri", "an",
                                             "que", "zel", "ost", "ri", "na", "fel", "gar", "is", "mon", "tha"};
const std::vector<std::string> kMonths = {"January", "February", "March",     "April",   "May",      "June",
                                          "July",    "August",   "September", "October", "November", "December"};

struct Attribute {
  std::string id;
  const AttributeSpec* spec;
  std::vector<std::string> headings;
  std::string predicate;
  std::string label;
  double empty_rate = 0;
  double kb_coverage = 0;
  std::vector<std::pair<std::string, std::string>> entity_pool;  // (id, label) for Entity values
};

struct Topic {
  std::string name;
  std::string slug;
  std::vector<std::pair<std::string, std::string>> entities;  // (id, label)
  std::vector<std::size_t> attributes;                        // indices into world attributes
  std::vector<std::size_t> distractors;                       // distractor attributes
  std::vector<std::size_t> extras;                            // distractor-only columns
};

class Generator {
 public:
  explicit Generator(const SyntheticParams& p) : p_(p), rng_(p.seed) {}

  SyntheticWorld run() {
    if (p_.topics == 0 || p_.topics > kTopicNames.size()) throw std::invalid_argument("topics must be in 1..8");
    if (p_.min_rows == 0 || p_.min_rows > p_.max_rows || p_.min_attr_cols == 0 || p_.min_attr_cols > p_.max_attr_cols)
      throw std::invalid_argument("invalid synthetic table shape");
    make_topics();
    make_values();
    make_kb();
    for (std::size_t t = 0; t < topics_.size(); ++t) {
      for (std::size_t i = 0; i < p_.main_tables_per_topic; ++i) make_main_table(t, i);
      for (std::size_t i = 0; i < p_.distractor_tables_per_topic; ++i) make_distractor_table(t, i);
    }
    make_pairs();
    for (const auto& tr : world_.triples) world_.kb.add(tr);
    for (const auto& [p, l] : world_.labels) world_.kb.set_label(p, l);
    return std::move(world_);
  }

 private:
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string word() {
    std::string w;
    const std::size_t n = 2 + pick(2);
    for (std::size_t i = 0; i < n; ++i) w += kSyllables[pick(kSyllables.size())];
    w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    return w;
  }

  std::string fresh_name() {
    for (;;) {
      auto n = word() + " " + word();
      if (names_.insert(n).second) return n;
    }
  }

  std::size_t add_attribute(const std::string& id, const AttributeSpec* spec, std::vector<std::string> headings,
                            std::string predicate, std::string label) {
    Attribute a;
    a.id = id;
    a.spec = spec;
    a.headings = std::move(headings);
    a.predicate = std::move(predicate);
    a.label = std::move(label);
    static const double kEmptyRates[] = {0.0, 0.05, 0.15, 0.3, 0.5};
    a.empty_rate = kEmptyRates[pick(5)];
    a.kb_coverage = p_.kb_coverage_min + (p_.kb_coverage_max - p_.kb_coverage_min) * uniform();
    if (spec->type == ValueType::Entity) {
      for (std::size_t k = 0; k < 25; ++k) {
        auto name = fresh_name();
        a.entity_pool.emplace_back("obj_" + id + "_" + std::to_string(k), name);
      }
    }
    attrs_.push_back(std::move(a));
    return attrs_.size() - 1;
  }

  void make_topics() {
    const auto& cat = catalog();
    for (std::size_t t = 0; t < p_.topics; ++t) {
      Topic topic;
      topic.name = kTopicNames[t];
      topic.slug = "t" + std::to_string(t);
      for (std::size_t e = 0; e < p_.entities_per_topic; ++e)
        topic.entities.emplace_back(topic.slug + "_e" + std::to_string(e), fresh_name());
      // Mix of types: walk the catalog in a shuffled order, at least one per main type.
      std::vector<std::size_t> order(cat.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng_);
      std::vector<std::size_t> chosen;
      for (ValueType vt : main_types())
        for (auto i : order)
          if (cat[i].type == vt) {
            chosen.push_back(i);
            break;
          }
      for (auto i : order) {
        if (chosen.size() >= std::max<std::size_t>(4, p_.attributes_per_topic)) break;
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) chosen.push_back(i);
      }
      for (auto i : chosen) {
        const auto& spec = cat[i];
        std::string id = topic.slug + "/" + spec.name;
        std::string pred = "dbo:" + std::string(spec.name);
        topic.attributes.push_back(add_attribute(id, &spec, spec.synonyms, pred, spec.kb_label));
      }
      // Distractors reuse a synonym of a main attribute for a different
      // attribute, both in tables and as a KB predicate label.
      std::vector<std::size_t> coll = topic.attributes;
      std::shuffle(coll.begin(), coll.end(), rng_);
      coll.resize(std::min(p_.collisions_per_topic, coll.size()));
      for (auto a : coll) {
        const auto& main = attrs_[a];
        const std::string heading = main.headings[1];
        std::string id = main.id + "#other";
        std::string pred = "dbp:" + std::string(main.spec->name) + "Other";
        topic.distractors.push_back(add_attribute(id, main.spec, {heading}, pred, heading));
      }
      static const AttributeSpec kEvent{"event", ValueType::String, {"event", "ceremony"}, "event", "", 0, 0};
      static const AttributeSpec kEdition{"edition", ValueType::Quantity, {"edition", "round"}, "edition", "", 1, 80};
      topic.extras.push_back(add_attribute(topic.slug + "/event", &kEvent, kEvent.synonyms, "", ""));
      topic.extras.push_back(add_attribute(topic.slug + "/edition", &kEdition, kEdition.synonyms, "", ""));
      topics_.push_back(std::move(topic));
    }
  }

  // Canonical raw value (also used as the KB literal).
  std::string make_raw(const Attribute& a, std::string* entity_id) {
    const auto& s = *a.spec;
    switch (s.type) {
      case ValueType::Quantity: {
        auto n = std::to_string(range(s.lo, s.hi));
        return std::string(s.unit).empty() ? n : n + " " + s.unit;
      }
      case ValueType::DateTime: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", range(s.lo, s.hi), range(1, 12), range(1, 28));
        return buf;
      }
      case ValueType::String:
        return word() + " " + word();
      case ValueType::Entity: {
        const auto& [id, label] = a.entity_pool[pick(a.entity_pool.size())];
        *entity_id = id;
        return label;
      }
      default:
        return word();
    }
  }

  void make_values() {
    for (const auto& topic : topics_) {
      std::vector<std::size_t> all = topic.attributes;
      all.insert(all.end(), topic.distractors.begin(), topic.distractors.end());
      all.insert(all.end(), topic.extras.begin(), topic.extras.end());
      for (const auto& [e, label] : topic.entities) {
        for (auto ai : all) {
          const auto& a = attrs_[ai];
          if (uniform() < a.empty_rate) continue;
          std::string eid;
          auto raw = make_raw(a, &eid);
          values_[{e, a.id}] = {raw, eid};
          world_.truth[{e, a.id}] = a.spec->type == ValueType::Entity ? NormalizedValue{ValueType::Entity, EntityRef{eid}}
                                                                     : normalize(raw, a.spec->type);
        }
      }
    }
  }

  std::string kb_literal(const std::string& raw, const std::string& eid) { return eid.empty() ? raw : "<" + eid + ">"; }

  void make_kb() {
    for (const auto& topic : topics_) {
      std::vector<std::size_t> kb_attrs = topic.attributes;
      kb_attrs.insert(kb_attrs.end(), topic.distractors.begin(), topic.distractors.end());
      for (auto ai : kb_attrs) world_.labels[attrs_[ai].predicate] = attrs_[ai].label;
      for (const auto& [e, label] : topic.entities) {
        world_.triples.push_back({e, "rdfs:label", label});
        world_.triples.push_back({e, "dbo:wikiPageID", std::to_string(range(1000, 9999999))});
        for (auto ai : kb_attrs) {
          const auto& a = attrs_[ai];
          auto it = values_.find({e, a.id});
          if (it == values_.end() || uniform() >= a.kb_coverage) continue;
          auto [raw, eid] = it->second;
          if (uniform() < p_.kb_noise) {
            eid.clear();
            raw = make_raw(a, &eid);
          }
          world_.triples.push_back({e, a.predicate, kb_literal(raw, eid)});
        }
      }
      for (const auto& a : attrs_)
        if (a.spec->type == ValueType::Entity)
          for (const auto& [id, label] : a.entity_pool) world_.triples.push_back({id, "rdfs:label", label});
    }
    world_.labels["rdfs:label"] = "label";
    world_.labels["dbo:wikiPageID"] = "wikipedia page id";
  }

  // Renders a value the way a table author might write it.
  std::string surface(const Attribute& a, const std::string& raw) {
    const auto& s = *a.spec;
    if (s.type == ValueType::Quantity) {
      const auto sp = raw.find(' ');
      std::string num = raw.substr(0, sp);
      std::string rest = sp == std::string::npos ? "" : raw.substr(sp);
      if (num.size() > 3 && uniform() < 0.5) {
        std::string grouped;
        const std::size_t lead = num.size() % 3 == 0 ? 3 : num.size() % 3;
        grouped = num.substr(0, lead);
        for (std::size_t i = lead; i < num.size(); i += 3) grouped += "," + num.substr(i, 3);
        num = grouped;
      }
      return num + rest;
    }
    if (s.type == ValueType::DateTime) {
      const int y = std::stoi(raw.substr(0, 4)), m = std::stoi(raw.substr(5, 2)), d = std::stoi(raw.substr(8, 2));
      switch (pick(3)) {
        case 0:
          return std::to_string(d) + " " + kMonths[m - 1] + " " + std::to_string(y);
        case 1:
          return kMonths[m - 1] + " " + std::to_string(d) + ", " + std::to_string(y);
        default:
          return raw;
      }
    }
    return raw;
  }

  Cell make_cell(const Attribute& a, const std::string& entity, bool allow_noise) {
    Cell c;
    auto it = values_.find({entity, a.id});
    std::string raw, eid;
    if (it == values_.end()) {
      if (!allow_noise || uniform() >= p_.table_junk) return c;
      raw = make_raw(a, &eid);
    } else {
      if (uniform() < p_.table_missing) return c;
      std::tie(raw, eid) = it->second;
      if (allow_noise && uniform() < p_.table_noise) {
        eid.clear();
        raw = make_raw(a, &eid);
      }
    }
    c.text = surface(a, raw);
    if (!eid.empty()) c.entity = eid;
    return c;
  }

  PageMeta make_meta(bool popular) {
    PageMeta m;
    m.in_links = static_cast<std::uint64_t>(range(0, popular ? 400 : 120));
    m.out_links = static_cast<std::uint64_t>(range(5, 300));
    m.page_views = static_cast<std::uint64_t>(range(10, popular ? 50000 : 8000));
    m.tables_on_page = static_cast<std::uint64_t>(range(1, 6));
    m.page_chars = static_cast<std::uint64_t>(range(3000, 60000));
    m.table_chars = static_cast<std::uint64_t>(range(300, static_cast<int>(m.page_chars / 2)));
    return m;
  }

  std::vector<std::size_t> sample_rows(const Topic& topic) {
    std::vector<std::size_t> idx(topic.entities.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng_);
    const std::size_t n = std::min(idx.size(), p_.min_rows + pick(p_.max_rows - p_.min_rows + 1));
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
    return idx;
  }

  std::string pick_heading(const Attribute& a) {
    if (a.headings.size() == 1) return a.headings[0];
    const double r = uniform();
    if (r < 0.5) return a.headings[0];
    return a.headings[1 + pick(a.headings.size() - 1)];
  }

  void emit_table(const Topic& topic, const std::string& id, const std::string& title, const std::string& caption,
                  const std::vector<std::size_t>& columns, bool popular) {
    RelationalTable t;
    t.id = id;
    t.page_title = title;
    t.caption = caption;
    t.headings.push_back("name");
    std::vector<std::string> col_attr{""};
    std::set<std::string> used{t.headings[0]};
    for (auto ai : columns) {
      const auto& a = attrs_[ai];
      std::vector<std::string> options{normalize_label(pick_heading(a))};
      for (const auto& h : a.headings) options.push_back(normalize_label(h));
      auto free = std::find_if(options.begin(), options.end(), [&](const std::string& h) { return !used.count(h); });
      if (free == options.end()) continue;
      used.insert(*free);
      t.headings.push_back(*free);
      col_attr.push_back(a.id);
    }
    for (auto r : sample_rows(topic)) {
      const auto& [eid, label] = topic.entities[r];
      std::vector<Cell> row;
      Cell core;
      core.text = label;
      core.entity = eid;
      row.push_back(std::move(core));
      for (std::size_t c = 1; c < col_attr.size(); ++c) {
        const auto& a = *std::find_if(attrs_.begin(), attrs_.end(), [&](const Attribute& x) { return x.id == col_attr[c]; });
        row.push_back(make_cell(a, eid, true));
      }
      t.rows.push_back(std::move(row));
    }
    t.meta = make_meta(popular);
    t.core_column = 0;
    normalize_table(t);
    world_.column_attribute[t.id] = std::move(col_attr);
    table_topic_[t.id] = {&topic - topics_.data(), popular};
    world_.tables.push_back(std::move(t));
  }

  void make_main_table(std::size_t ti, std::size_t i) {
    const auto& topic = topics_[ti];
    auto cols = topic.attributes;
    std::shuffle(cols.begin(), cols.end(), rng_);
    const std::size_t n = std::min(cols.size(), p_.min_attr_cols + pick(p_.max_attr_cols - p_.min_attr_cols + 1));
    cols.resize(n);
    static const std::vector<std::string> kTitles = {"List of ", "Notable ", "Index of ", "Historic "};
    const std::string title = kTitles[pick(kTitles.size())] + topic.name;
    const std::string caption = topic.name + " overview " + std::to_string(i + 1);
    emit_table(topic, topic.slug + "_m" + std::to_string(i), title, caption, cols, true);
  }

  void make_distractor_table(std::size_t ti, std::size_t i) {
    const auto& topic = topics_[ti];
    std::vector<std::size_t> cols = topic.distractors;
    cols.insert(cols.end(), topic.extras.begin(), topic.extras.end());
    std::shuffle(cols.begin(), cols.end(), rng_);
    const std::string title = topic.name + " awards and events";
    const std::string caption = "award ceremonies " + std::to_string(i + 1);
    emit_table(topic, topic.slug + "_d" + std::to_string(i), title, caption, cols, false);
  }

  void make_pairs() {
    const auto& ts = world_.tables;
    if (ts.size() < 2) return;
    std::map<std::pair<std::size_t, bool>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < ts.size(); ++i) groups[table_topic_.at(ts[i].id)].push_back(i);
    auto grade = [&](const RelationalTable& a, const RelationalTable& b) {
      if (table_topic_.at(a.id) != table_topic_.at(b.id)) return 0;
      std::set<std::string> ea;
      for (std::size_t r = 0; r < a.num_rows(); ++r) ea.insert(*a.core_entity(r));
      for (std::size_t r = 0; r < b.num_rows(); ++r)
        if (ea.count(*b.core_entity(r))) return 2;
      return 1;
    };
    // Thirds: same topic and kind, same topic other kind, anything.
    for (std::size_t k = 0; k < p_.tmatch_pairs; ++k) {
      const std::size_t a = pick(ts.size());
      const auto key = table_topic_.at(ts[a].id);
      const std::vector<std::size_t>* pool = nullptr;
      if (k % 3 == 0) pool = &groups[key];
      if (k % 3 == 1) pool = &groups[{key.first, !key.second}];
      std::size_t b = a;
      for (int tries = 0; tries < 20 && b == a; ++tries)
        b = pool && !pool->empty() ? (*pool)[pick(pool->size())] : pick(ts.size());
      if (b == a) continue;
      world_.tmatch_pairs.push_back({ts[a].id, ts[b].id, grade(ts[a], ts[b])});
    }
  }

  SyntheticParams p_;
  std::mt19937_64 rng_;
  SyntheticWorld world_;
  std::vector<Attribute> attrs_;
  std::vector<Topic> topics_;
  std::set<std::string> names_;
  std::map<std::pair<std::string, std::string>, std::pair<std::string, std::string>> values_;
  std::map<std::string, std::pair<std::size_t, bool>> table_topic_;
};

}  // namespace

Truth SyntheticWorld::truth_for(const std::string& table_id, std::size_t col, const std::string& entity) const {
  Truth t;
  const auto& attrs = column_attribute.at(table_id);
  const auto& a = attrs.at(col);
  auto it = truth.find({entity, a});
  if (it == truth.end())
    t.empty = true;
  else
    t.values.push_back(it->second);
  return t;
}

Truth SyntheticWorld::truth_for(const TestCell& cell) const { return truth_for(cell.table_id, cell.col, cell.entity); }

void SyntheticWorld::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream c(dir / "corpus.jsonl");
  for (const auto& t : tables) c << table_to_json(t).dump() << '\n';
  std::ofstream tr(dir / "triples.tsv");
  for (const auto& t : triples) tr << t.subject << '\t' << t.predicate << '\t' << t.object << '\n';
  std::ofstream l(dir / "labels.tsv");
  for (const auto& [p, label] : labels) l << p << '\t' << label << '\n';
  std::ofstream pr(dir / "tmatch_pairs.tsv");
  write_graded_pairs(pr, tmatch_pairs);
  if (!c || !tr || !l || !pr) throw std::runtime_error("cannot write synthetic world to " + dir.string());
}

SyntheticWorld generate_world(const SyntheticParams& params) { return Generator(params).run(); }

}  // namespace cellac
