#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace e2t {

enum class EntityEncoderKind { rnn, cnn };
enum class PoolingKind { firm, soft };

// Run configuration. Defaults follow the reference recipe: 300D word and
// 1000D entity vectors, state size 500, 50K vocabularies, CNN filters
// 3/4/5 with 400/300/300 feature maps, dropout 0.5, beam 10.
struct RunConfig {
  std::uint64_t seed = 42;
  std::size_t vocab_cap = 50000;
  std::size_t word_dim = 300;
  std::size_t entity_dim = 1000;
  std::size_t state = 500;
  std::size_t att_dim = 500;
  std::size_t out_dim = 500;

  bool use_e2t = true;
  EntityEncoderKind e2t_encoder = EntityEncoderKind::cnn;
  PoolingKind e2t_pooling = PoolingKind::firm;
  bool e2t_gate = true;
  bool e2t_vector_gate = false;
  std::size_t e2t_k = 5;
  std::size_t e2t_state = 500;
  std::vector<std::pair<std::size_t, std::size_t>> cnn_filters = {
      {3, 400}, {4, 300}, {5, 300}};  // (filter size, feature maps)

  double dropout = 0.5;
  std::size_t batch_size = 80;
  std::size_t max_epochs = 30;
  std::size_t patience = 3;
  std::size_t beam = 10;
  std::size_t max_len = 30;
  std::size_t tune_budget = 2;  // training epochs per k candidate
  bool length_norm = false;

  std::string word_vectors;    // optional pretrained embedding paths
  std::string entity_vectors;

  // Output width of the disambiguating encoder: 2*e2t_state for the RNN,
  // total feature maps for the CNN.
  std::size_t entity_encoding_dim() const;
  // Width of the topic vector concatenated to decoder states.
  std::size_t topic_dim() const { return entity_encoding_dim(); }

  void validate() const;
};

// Flat key=value file, one entry per line, '#' starts a comment. Unknown keys
// are rejected. Later `overrides` entries win over file values.
RunConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});
RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);
std::string config_to_text(const RunConfig& cfg);

}  // namespace e2t
