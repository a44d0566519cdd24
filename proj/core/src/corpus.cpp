#include "e2t/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace e2t {

namespace {

using json = nlohmann::ordered_json;

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void validate(const AnnotatedDocument& doc, const LoadOptions& opts) {
  if (doc.source_tokens.empty()) throw std::runtime_error("empty source_tokens");
  if (opts.require_target && doc.target_tokens.empty()) {
    throw std::runtime_error("empty target_tokens");
  }
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    const EntityMention& m = doc.entities[i];
    if (m.entity_id.empty()) throw std::runtime_error("entity with empty id");
    if (m.start >= m.end) {
      throw std::runtime_error("entity span [" + std::to_string(m.start) + "," +
                               std::to_string(m.end) + ") is empty");
    }
    if (m.end > doc.source_tokens.size()) {
      throw std::runtime_error("entity span end " + std::to_string(m.end) +
                               " exceeds source length " +
                               std::to_string(doc.source_tokens.size()));
    }
    if (i > 0 && m.start < prev_end) {
      throw std::runtime_error("entity spans overlap or are unsorted at mention " +
                               std::to_string(i));
    }
    prev_end = m.end;
  }
}

AnnotatedDocument parse_document(const json& j) {
  AnnotatedDocument doc;
  doc.id = j.value("id", "");
  doc.source_tokens = j.at("source_tokens").get<std::vector<std::string>>();
  doc.target_tokens = j.value("target_tokens", std::vector<std::string>{});
  if (j.contains("entities")) {
    for (const auto& e : j.at("entities")) {
      EntityMention m;
      m.entity_id = e.at("id").get<std::string>();
      m.start = e.at("start").get<std::size_t>();
      m.end = e.at("end").get<std::size_t>();
      doc.entities.push_back(std::move(m));
    }
  }
  return doc;
}

}  // namespace

AnnotatedDocument document_from_json(const std::string& line) {
  return parse_document(json::parse(line));
}

std::string document_to_json(const AnnotatedDocument& doc) {
  json j;
  j["id"] = doc.id;
  j["source_tokens"] = doc.source_tokens;
  j["target_tokens"] = doc.target_tokens;
  j["entities"] = json::array();
  for (const EntityMention& m : doc.entities) {
    j["entities"].push_back({{"id", m.entity_id}, {"start", m.start}, {"end", m.end}});
  }
  return j.dump();
}

std::vector<AnnotatedDocument> load_corpus(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path);
  std::vector<AnnotatedDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      AnnotatedDocument doc = document_from_json(line);
      validate(doc, opts);
      docs.push_back(std::move(doc));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

void save_corpus(const std::vector<AnnotatedDocument>& docs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const AnnotatedDocument& doc : docs) out << document_to_json(doc) << '\n';
}

// ---------------------------------------------------------------------------

void Gazetteer::add(std::vector<std::string> surface, std::string entity_id) {
  if (surface.empty()) throw std::invalid_argument("gazetteer surface form is empty");
  for (auto& t : surface) t = lower(t);
  max_len_ = std::max(max_len_, surface.size());
  entries_[std::move(surface)] = std::move(entity_id);
}

Gazetteer Gazetteer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gazetteer file " + path);
  Gazetteer g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'surface form<TAB>entity id'");
    }
    std::istringstream surface_in(line.substr(0, tab));
    std::vector<std::string> surface;
    std::string tok;
    while (surface_in >> tok) surface.push_back(tok);
    g.add(std::move(surface), line.substr(tab + 1));
  }
  return g;
}

std::vector<EntityMention> Gazetteer::annotate(const std::vector<std::string>& tokens) const {
  std::vector<std::string> lowered(tokens.size());
  std::transform(tokens.begin(), tokens.end(), lowered.begin(), lower);
  std::vector<EntityMention> mentions;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best_len = 0;
    const std::string* best_id = nullptr;
    const std::size_t longest = std::min(max_len_, tokens.size() - i);
    std::vector<std::string> window;
    window.reserve(longest);
    for (std::size_t len = 1; len <= longest; ++len) {
      window.push_back(lowered[i + len - 1]);
      auto it = entries_.find(window);
      if (it != entries_.end()) {
        best_len = len;
        best_id = &it->second;
      }
    }
    if (best_id) {
      mentions.push_back(EntityMention{*best_id, i, i + best_len});
      i += best_len;
    } else {
      ++i;
    }
  }
  return mentions;
}

// ---------------------------------------------------------------------------

StatsReport corpus_stats(const std::vector<AnnotatedDocument>& docs) {
  if (docs.empty()) throw std::invalid_argument("corpus_stats: empty corpus");
  StatsReport r;
  r.num_documents = docs.size();
  std::size_t in_words = 0, out_words = 0, entities = 0;
  r.min_input_entities = docs.front().entities.size();
  for (const AnnotatedDocument& d : docs) {
    in_words += d.source_tokens.size();
    out_words += d.target_tokens.size();
    entities += d.entities.size();
    r.min_input_entities = std::min(r.min_input_entities, d.entities.size());
    r.max_input_entities = std::max(r.max_input_entities, d.entities.size());
  }
  const double n = static_cast<double>(docs.size());
  r.avg_input_words = static_cast<double>(in_words) / n;
  r.avg_output_words = static_cast<double>(out_words) / n;
  r.avg_input_entities = static_cast<double>(entities) / n;
  return r;
}

std::string StatsReport::to_string() const {
  std::ostringstream os;
  os << "num(data)\t" << num_documents << '\n';
  os << "avg(inputWord)\t" << avg_input_words << '\n';
  os << "avg(outputWord)\t" << avg_output_words << '\n';
  os << "min(inputEntity)\t" << min_input_entities << '\n';
  os << "max(inputEntity)\t" << max_input_entities << '\n';
  os << "avg(inputEntity)\t" << avg_input_entities << '\n';
  return os.str();
}

}  // namespace e2t
