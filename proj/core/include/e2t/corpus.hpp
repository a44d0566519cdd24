#pragma once

#include <map>
#include <string>
#include <vector>

namespace e2t {

// A linked-entity mention: half-open token span [start, end) over the source.
struct EntityMention {
  std::string entity_id;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const EntityMention&) const = default;
};

struct AnnotatedDocument {
  std::string id;
  std::vector<std::string> source_tokens;
  std::vector<std::string> target_tokens;
  std::vector<EntityMention> entities;  // sorted by start, non-overlapping

  bool operator==(const AnnotatedDocument&) const = default;
};

struct LoadOptions {
  bool require_target = true;  // relaxed for summarize-only inputs
};

// JSON-lines corpus IO. One record per line:
//   {"id": ..., "source_tokens": [...], "target_tokens": [...],
//    "entities": [{"id": ..., "start": ..., "end": ...}, ...]}
// Malformed records raise std::runtime_error carrying the 1-based line number.
std::vector<AnnotatedDocument> load_corpus(const std::string& path,
                                           const LoadOptions& opts = {});
void save_corpus(const std::vector<AnnotatedDocument>& docs, const std::string& path);
std::string document_to_json(const AnnotatedDocument& doc);
AnnotatedDocument document_from_json(const std::string& line);

// Deterministic stand-in for an entity linking system: maps lowercase
// surface-form token sequences to entity ids.
class Gazetteer {
 public:
  void add(std::vector<std::string> surface, std::string entity_id);
  static Gazetteer load(const std::string& path);  // TSV: surface form \t id
  std::size_t size() const { return entries_.size(); }

  // Greedy left-to-right longest match; matched spans are consumed so the
  // output spans never overlap. Matching is case-insensitive.
  std::vector<EntityMention> annotate(const std::vector<std::string>& tokens) const;

 private:
  std::map<std::vector<std::string>, std::string> entries_;
  std::size_t max_len_ = 0;
};

// Dataset statistics in the num/avg/min/max schema used for corpus summaries.
struct StatsReport {
  std::size_t num_documents = 0;
  double avg_input_words = 0.0;
  double avg_output_words = 0.0;
  std::size_t min_input_entities = 0;
  std::size_t max_input_entities = 0;
  double avg_input_entities = 0.0;

  std::string to_string() const;
};

StatsReport corpus_stats(const std::vector<AnnotatedDocument>& docs);

}  // namespace e2t
