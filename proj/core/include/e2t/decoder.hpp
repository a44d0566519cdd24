#pragma once

#include <optional>
#include <vector>

#include "e2t/encoder.hpp"
#include "e2t/entity2topic.hpp"

namespace e2t {

template <class A>
struct AttentionResult {
  typename A::V weights;
  typename A::V context;
};

// g_i = va^T tanh(Wa q + Ua h_i), a = softmax(g + mask), c = sum_i a_i h_i.
// precomputed = H Ua^T may be cached per source sequence. An optional mask
// adds -1e9 to padded positions before the softmax.
template <class A>
AttentionResult<A> additive_attention(A& alg, const ModelNames& names, typename A::V H,
                                      typename A::V precomputed, typename A::V query,
                                      const Tensor* pad_mask = nullptr) {
  using V = typename A::V;
  V scores = alg.matvec(
      alg.tanh(alg.add_row_broadcast(precomputed,
                                     alg.matvec(alg.param(names.dec_attn_Wa), query))),
      alg.param(names.dec_attn_va));
  if (pad_mask) scores = alg.add(scores, alg.constant(*pad_mask));
  AttentionResult<A> out;
  out.weights = alg.softmax(scores);
  out.context = alg.matvec_t(H, out.weights);
  return out;
}

template <class A>
typename A::V attention_precompute(A& alg, const ModelNames& names, typename A::V H) {
  return alg.matmul_nt(H, alg.param(names.dec_attn_Ua));  // n x att
}

template <class A>
struct DecoderStep {
  typename A::V state_l1;
  typename A::V state_l2;
  typename A::V context;      // c_t
  typename A::V logits;
  typename A::V att_weights;
};

// One decoder time step.
//   layer-1 input: [embed(y_prev); c_prev]
//   attention query: previous top-layer state
//   o = Ww embed(y_prev) + Wc c_t + Ws s', where s' = [s_t; topic] when present
template <class A>
DecoderStep<A> decoder_step(A& alg, const ModelNames& names, int y_prev,
                            typename A::V s1_prev, typename A::V s2_prev,
                            typename A::V c_prev, typename A::V H,
                            typename A::V att_precomputed,
                            const std::optional<typename A::V>& topic,
                            const Tensor* pad_mask = nullptr) {
  using V = typename A::V;
  if (y_prev < 0) throw std::invalid_argument("decoder_step: negative token id");
  V emb = alg.dropout(alg.row(alg.param(names.emb_tgt), static_cast<std::size_t>(y_prev)));
  V h1 = gru_cell(alg, names.dec_l1, alg.concat({emb, c_prev}), s1_prev);
  V h2 = gru_cell(alg, names.dec_l2, alg.dropout(h1), s2_prev);
  AttentionResult<A> att =
      additive_attention(alg, names, H, att_precomputed, s2_prev, pad_mask);
  V h2_out = alg.dropout(h2);
  V s_out = topic.has_value() ? alg.concat({h2_out, *topic}) : h2_out;
  V o = alg.add(alg.add(alg.matvec(alg.param(names.out_Ww), emb),
                        alg.matvec(alg.param(names.out_Wc), att.context)),
                alg.matvec(alg.param(names.out_Ws), s_out));
  DecoderStep<A> out;
  out.state_l1 = h1;
  out.state_l2 = h2;
  out.context = att.context;
  out.logits = alg.matvec(alg.param(names.out_Wo), alg.dropout(o));
  out.att_weights = att.weights;
  return out;
}

}  // namespace e2t
