#pragma once

#include <optional>
#include <vector>

#include "e2t/config.hpp"
#include "e2t/encoder.hpp"

namespace e2t {

// Mask value standing in for -inf in the firm-attention score vector.
inline constexpr double kNegInf = -1e9;

// Indices of the min(k, m) largest scores; ties broken by lower index.
// Returned ascending.
std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k);

// P[i] = 0 for i in keep, kNegInf otherwise. keep must be non-empty.
Tensor sparse_mask(const std::vector<std::size_t>& keep, std::size_t m);

// Globally disambiguating encoder: bidirectional GRU over the entity
// sequence, per-entity output [fwd_i; bwd_i].
template <class A>
std::vector<typename A::V> encode_entities_rnn(A& alg, const ModelNames& names,
                                               std::size_t state,
                                               const std::vector<typename A::V>& entities) {
  if (entities.empty()) throw std::invalid_argument("encode_entities_rnn: no entities");
  BiGruStates<A> states =
      bigru_layer(alg, names.e2t_rnn_fwd, names.e2t_rnn_bwd, entities, state);
  std::vector<typename A::V> out;
  out.reserve(entities.size());
  for (std::size_t i = 0; i < entities.size(); ++i) {
    out.push_back(alg.concat({states.fwd[i], states.bwd[i]}));
  }
  return out;
}

// Locally disambiguating encoder: for each filter size h the sequence is
// padded with zero vectors (ceil((h-1)/2) left, floor((h-1)/2) right) so each
// position keeps an h-entity window and the output count stays m. Window
// vectors are concatenated and convolved as tanh(W [window] + b); per-entity
// outputs concatenate the feature maps of every filter size.
template <class A>
std::vector<typename A::V> encode_entities_cnn(
    A& alg, std::size_t entity_dim,
    const std::vector<std::pair<std::size_t, std::size_t>>& filters,
    const std::vector<typename A::V>& entities) {
  if (entities.empty()) throw std::invalid_argument("encode_entities_cnn: no entities");
  using V = typename A::V;
  const std::size_t m = entities.size();
  V zero_pad = alg.constant(Tensor::zeros({entity_dim}));
  std::vector<V> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<V> per_filter;
    per_filter.reserve(filters.size());
    for (const auto& [h, maps] : filters) {
      const std::size_t left = h / 2;  // ceil((h-1)/2)
      std::vector<V> window;
      window.reserve(h);
      for (std::size_t w = 0; w < h; ++w) {
        const std::ptrdiff_t j =
            static_cast<std::ptrdiff_t>(i + w) - static_cast<std::ptrdiff_t>(left);
        window.push_back(
            (j < 0 || j >= static_cast<std::ptrdiff_t>(m)) ? zero_pad : entities[j]);
      }
      V conv = alg.tanh(
          alg.add(alg.matvec(alg.param(ModelNames::cnn_weight(h)), alg.concat(window)),
                  alg.param(ModelNames::cnn_bias(h))));
      per_filter.push_back(conv);
    }
    out.push_back(per_filter.size() == 1 ? per_filter[0] : alg.concat(per_filter));
  }
  return out;
}

// d = sigma(Wd e' + bd); e~ = d * tanh(Wx e + bx) + (1-d) * tanh(Wy e' + by).
// The gate is scalar unless vector_gate is set.
template <class A>
typename A::V selective_disambiguation(A& alg, const ModelNames& names,
                                       typename A::V entity, typename A::V encoded,
                                       bool vector_gate = false) {
  using V = typename A::V;
  V d = alg.sigmoid(alg.add(alg.matvec(alg.param(names.e2t_gate_Wd), encoded),
                            alg.param(names.e2t_gate_bd)));
  V fx = alg.tanh(alg.add(alg.matvec(alg.param(names.e2t_gate_Wx), entity),
                          alg.param(names.e2t_gate_bx)));
  V fy = alg.tanh(alg.add(alg.matvec(alg.param(names.e2t_gate_Wy), encoded),
                          alg.param(names.e2t_gate_by)));
  if (vector_gate) {
    return alg.add(alg.mul(d, fx), alg.mul(alg.one_minus(d), fy));
  }
  return alg.add(alg.scale_by(fx, d), alg.scale_by(fy, alg.one_minus(d)));
}

template <class A>
struct PooledTopic {
  typename A::V topic;
  typename A::V weights;  // probability vector over entities
};

// Scores g_i = va^T tanh(Wa e~_i + Ua s). Soft pooling applies softmax
// directly; firm pooling first adds the 0/-1e9 top-k mask. The mask is a
// constant: no gradient flows through the selection.
template <class A>
PooledTopic<A> attention_pool(A& alg, const ModelNames& names,
                              const std::vector<typename A::V>& items,
                              typename A::V context, std::optional<std::size_t> top_k) {
  if (items.empty()) throw std::invalid_argument("attention_pool: no items");
  using V = typename A::V;
  V stacked = alg.stack_rows(items);  // m x D
  V scored = alg.matvec(
      alg.tanh(alg.add_row_broadcast(alg.matmul_nt(stacked, alg.param(names.e2t_attn_Wa)),
                                     alg.matvec(alg.param(names.e2t_attn_Ua), context))),
      alg.param(names.e2t_attn_va));
  if (top_k.has_value()) {
    if (*top_k == 0) throw std::invalid_argument("attention_pool: k must be positive");
    const Tensor& g = alg.value(scored);
    std::vector<double> scores(g.data(), g.data() + g.size());
    scored = alg.add(scored,
                     alg.constant(sparse_mask(top_k_indices(scores, *top_k), items.size())));
  }
  PooledTopic<A> out;
  out.weights = alg.softmax(scored);
  out.topic = alg.matvec_t(stacked, out.weights);
  return out;
}

template <class A>
struct TopicResult {
  typename A::V topic;
  typename A::V weights;
  bool has_entities = false;
};

// Full module: embed entity ids, disambiguate, pool into the topic vector.
// With no entities the topic vector is zero and attention is skipped.
template <class A>
TopicResult<A> entity_topic_vector(A& alg, const ModelNames& names, const RunConfig& cfg,
                                   const std::vector<int>& entity_ids,
                                   typename A::V context) {
  using V = typename A::V;
  TopicResult<A> out;
  if (entity_ids.empty()) {
    out.topic = alg.constant(Tensor::zeros({cfg.topic_dim()}));
    out.weights = alg.constant(Tensor::zeros({1}));
    return out;
  }
  V emb = alg.param(names.emb_ent);
  std::vector<V> entities;
  entities.reserve(entity_ids.size());
  for (int id : entity_ids) {
    if (id < 0) throw std::invalid_argument("entity_topic_vector: negative entity id");
    entities.push_back(alg.dropout(alg.row(emb, static_cast<std::size_t>(id))));
  }
  std::vector<V> encoded =
      cfg.e2t_encoder == EntityEncoderKind::rnn
          ? encode_entities_rnn(alg, names, cfg.e2t_state, entities)
          : encode_entities_cnn(alg, cfg.entity_dim, cfg.cnn_filters, entities);
  std::vector<V> disambiguated;
  disambiguated.reserve(entities.size());
  for (std::size_t i = 0; i < entities.size(); ++i) {
    V e = cfg.e2t_gate ? selective_disambiguation(alg, names, entities[i], encoded[i],
                                                  cfg.e2t_vector_gate)
                       : encoded[i];
    disambiguated.push_back(alg.dropout(e));
  }
  std::optional<std::size_t> k;
  if (cfg.e2t_pooling == PoolingKind::firm) k = cfg.e2t_k;
  PooledTopic<A> pooled = attention_pool(alg, names, disambiguated, context, k);
  out.topic = pooled.topic;
  out.weights = pooled.weights;
  out.has_entities = true;
  return out;
}

}  // namespace e2t
