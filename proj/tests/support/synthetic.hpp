#pragma once

// Synthetic corpora for training checks.

#include <string>
#include <vector>

#include "e2t/corpus.hpp"
#include "e2t/rng.hpp"

namespace synthetic {

// Random source/target pairs with no structure: a memorization workload.
inline std::vector<e2t::AnnotatedDocument> random_pairs(std::size_t n,
                                                        std::size_t vocab_size,
                                                        e2t::Rng& rng) {
  std::vector<e2t::AnnotatedDocument> docs;
  docs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    e2t::AnnotatedDocument d;
    d.id = "pair-" + std::to_string(i);
    const std::size_t src_len = 4 + rng.below(5);
    const std::size_t tgt_len = 2 + rng.below(3);
    for (std::size_t t = 0; t < src_len; ++t) {
      d.source_tokens.push_back("w" + std::to_string(rng.below(vocab_size)));
    }
    for (std::size_t t = 0; t < tgt_len; ++t) {
      d.target_tokens.push_back("w" + std::to_string(rng.below(vocab_size)));
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

// Topic-conditioned corpus where the target is a deterministic function of
// the entity multiset but NOT of the source tokens: every surface form is
// shared by two entities, so only the entity annotations disambiguate which
// topic word belongs in the target. A plain sequence-to-sequence model is
// capped at a coin flip on those positions; a model reading the entity list
// is not.
struct TopicCorpusSpec {
  std::size_t n_surfaces = 10;       // entities = 2 * n_surfaces
  std::size_t entities_per_doc = 3;  // drawn with replacement
  std::size_t n_fillers = 20;
};

inline std::vector<e2t::AnnotatedDocument> topic_conditioned(std::size_t n,
                                                             e2t::Rng& rng,
                                                             TopicCorpusSpec spec = {}) {
  std::vector<e2t::AnnotatedDocument> docs;
  docs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    e2t::AnnotatedDocument d;
    d.id = "topic-" + std::to_string(i);
    std::vector<std::size_t> entity_ids(spec.entities_per_doc);
    for (auto& e : entity_ids) e = rng.below(2 * spec.n_surfaces);
    for (std::size_t e : entity_ids) {
      const std::size_t fillers = 1 + rng.below(2);
      for (std::size_t f = 0; f < fillers; ++f) {
        d.source_tokens.push_back("f" + std::to_string(rng.below(spec.n_fillers)));
      }
      const std::size_t surface = e / 2;  // shared by entities 2s and 2s+1
      d.entities.push_back(e2t::EntityMention{"E" + std::to_string(e),
                                              d.source_tokens.size(),
                                              d.source_tokens.size() + 1});
      d.source_tokens.push_back("s" + std::to_string(surface));
    }
    d.source_tokens.push_back("f" + std::to_string(rng.below(spec.n_fillers)));
    std::vector<std::size_t> sorted = entity_ids;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t e : sorted) d.target_tokens.push_back("t" + std::to_string(e));
    docs.push_back(std::move(d));
  }
  return docs;
}

}  // namespace synthetic
