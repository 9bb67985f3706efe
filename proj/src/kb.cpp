#include "cellac/kb.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "cellac/text.hpp"

namespace cellac {

namespace {
const std::vector<std::string> kNoObjects;
}

std::string default_predicate_label(std::string_view predicate) {
  std::string_view p = predicate;
  if (p.size() > 2 && p.front() == '<' && p.back() == '>') p = p.substr(1, p.size() - 2);
  auto cut = p.find_last_of("/#:");
  if (cut != std::string_view::npos) p = p.substr(cut + 1);
  return normalize_label(split_camel_case(p));
}

KnowledgeBase KnowledgeBase::load(const std::filesystem::path& triples, const std::filesystem::path& labels,
                                  const EntityFilter& keep_subject) {
  std::ifstream t(triples);
  if (!t) throw std::runtime_error("cannot read triples file: " + triples.string());
  std::ifstream l(labels);
  if (!l) throw std::runtime_error("cannot read labels file: " + labels.string());
  return load_streams(t, l, keep_subject);
}

KnowledgeBase KnowledgeBase::load_streams(std::istream& triples, std::istream& labels,
                                          const EntityFilter& keep_subject) {
  KnowledgeBase kb;
  std::string line;
  while (std::getline(triples, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto parts = split(line, '\t');
    if (parts.size() != 3) {
      ++kb.skipped_;
      continue;
    }
    Triple tr{trim(parts[0]), trim(parts[1]), trim(parts[2])};
    if (tr.subject.empty() || tr.predicate.empty() || tr.object.empty()) {
      ++kb.skipped_;
      continue;
    }
    if (keep_subject && !keep_subject(tr.subject)) continue;
    kb.add(tr);
  }
  while (std::getline(labels, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto parts = split(line, '\t');
    if (parts.size() != 2 || trim(parts[0]).empty() || trim(parts[1]).empty()) {
      ++kb.skipped_;
      continue;
    }
    kb.set_label(trim(parts[0]), parts[1]);
  }
  return kb;
}

void KnowledgeBase::add(const Triple& t) {
  auto& objects = facts_[t.subject][t.predicate];
  if (std::find(objects.begin(), objects.end(), t.object) != objects.end()) return;
  objects.push_back(t.object);
  ++triples_;
}

void KnowledgeBase::set_label(const std::string& predicate, std::string_view label) {
  auto l = normalize_label(label);
  if (l.empty()) return;
  labels_.emplace(predicate, std::move(l));
}

const std::vector<std::string>& KnowledgeBase::lookup(std::string_view entity, std::string_view predicate) const {
  auto it = facts_.find(std::string(entity));
  if (it == facts_.end()) return kNoObjects;
  auto pit = it->second.find(std::string(predicate));
  return pit == it->second.end() ? kNoObjects : pit->second;
}

std::vector<std::string> KnowledgeBase::predicates_of(std::string_view entity) const {
  std::vector<std::string> out;
  auto it = facts_.find(std::string(entity));
  if (it == facts_.end()) return out;
  for (const auto& [p, objs] : it->second) out.push_back(p);
  return out;
}

bool KnowledgeBase::has_entity(std::string_view entity) const { return facts_.count(std::string(entity)) > 0; }

std::string KnowledgeBase::label(std::string_view predicate) const {
  auto it = labels_.find(std::string(predicate));
  if (it != labels_.end()) return it->second;
  return default_predicate_label(predicate);
}

std::vector<std::string> KnowledgeBase::predicates() const {
  std::set<std::string> ps;
  for (const auto& [s, m] : facts_)
    for (const auto& [p, o] : m) ps.insert(p);
  return {ps.begin(), ps.end()};
}

}  // namespace cellac
