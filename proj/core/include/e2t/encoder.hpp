#pragma once

#include <vector>

#include "e2t/algebra.hpp"
#include "e2t/parameters.hpp"

namespace e2t {

// z = sigma(Wz x + Uz h + bz); r = sigma(Wr x + Ur h + br)
// h~ = tanh(Wh x + Uh (r * h) + bh); h' = (1-z) * h + z * h~
template <class A>
typename A::V gru_cell(A& alg, const GruNames& n, typename A::V x, typename A::V h_prev) {
  using V = typename A::V;
  V z = alg.sigmoid(alg.add(
      alg.add(alg.matvec(alg.param(n.Wz), x), alg.matvec(alg.param(n.Uz), h_prev)),
      alg.param(n.bz)));
  V r = alg.sigmoid(alg.add(
      alg.add(alg.matvec(alg.param(n.Wr), x), alg.matvec(alg.param(n.Ur), h_prev)),
      alg.param(n.br)));
  V cand = alg.tanh(alg.add(
      alg.add(alg.matvec(alg.param(n.Wh), x),
              alg.matvec(alg.param(n.Uh), alg.mul(r, h_prev))),
      alg.param(n.bh)));
  return alg.add(alg.mul(alg.one_minus(z), h_prev), alg.mul(z, cand));
}

template <class A>
struct BiGruStates {
  std::vector<typename A::V> fwd;  // left-to-right scan, aligned to tokens
  std::vector<typename A::V> bwd;  // right-to-left scan, aligned to tokens
};

// Both scans start from a zero state.
template <class A>
BiGruStates<A> bigru_layer(A& alg, const GruNames& fwd_names, const GruNames& bwd_names,
                           const std::vector<typename A::V>& xs, std::size_t state) {
  if (xs.empty()) throw std::invalid_argument("bigru_layer: empty sequence");
  using V = typename A::V;
  const std::size_t n = xs.size();
  BiGruStates<A> out;
  out.fwd.reserve(n);
  out.bwd.resize(n);
  V h = alg.constant(Tensor::zeros({state}));
  for (std::size_t i = 0; i < n; ++i) {
    h = gru_cell(alg, fwd_names, xs[i], h);
    out.fwd.push_back(h);
  }
  h = alg.constant(Tensor::zeros({state}));
  for (std::size_t i = n; i-- > 0;) {
    h = gru_cell(alg, bwd_names, xs[i], h);
    out.bwd[i] = h;
  }
  return out;
}

template <class A>
struct EncoderOutput {
  std::vector<typename A::V> token_states;  // n vectors of width 2*state
  typename A::V H;                          // n x 2*state
  typename A::V s;                          // [fwd_n; bwd_1] of layer 2
};

// Two-layer bidirectional GRU. Layer 2 consumes layer 1's concatenated
// states; H stacks layer 2's per-token states and s concatenates the final
// forward and backward states.
template <class A>
EncoderOutput<A> encode_text(A& alg, const ModelNames& names, std::size_t state,
                             const std::vector<int>& token_ids) {
  if (token_ids.empty()) throw std::invalid_argument("encode_text: empty input");
  using V = typename A::V;
  V emb = alg.param(names.emb_src);
  std::vector<V> xs;
  xs.reserve(token_ids.size());
  for (int id : token_ids) {
    if (id < 0) throw std::invalid_argument("encode_text: negative token id");
    xs.push_back(alg.dropout(alg.row(emb, static_cast<std::size_t>(id))));
  }
  BiGruStates<A> l1 = bigru_layer(alg, names.enc_l1_fwd, names.enc_l1_bwd, xs, state);
  std::vector<V> l1_out;
  l1_out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    l1_out.push_back(alg.dropout(alg.concat({l1.fwd[i], l1.bwd[i]})));
  }
  BiGruStates<A> l2 = bigru_layer(alg, names.enc_l2_fwd, names.enc_l2_bwd, l1_out, state);
  EncoderOutput<A> out;
  out.token_states.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.token_states.push_back(alg.dropout(alg.concat({l2.fwd[i], l2.bwd[i]})));
  }
  out.H = alg.stack_rows(out.token_states);
  out.s = alg.dropout(alg.concat({l2.fwd.back(), l2.bwd.front()}));
  return out;
}

// Batched inputs arrive right-padded with PAD ids plus a true length; the
// scans only cover the first `length` tokens, so trailing padding never
// reaches the recurrences.
template <class A>
EncoderOutput<A> encode_text_masked(A& alg, const ModelNames& names, std::size_t state,
                                    const std::vector<int>& padded_ids,
                                    std::size_t length) {
  if (length == 0 || length > padded_ids.size()) {
    throw std::invalid_argument("encode_text_masked: bad sequence length");
  }
  return encode_text(alg, names, state,
                     std::vector<int>(padded_ids.begin(),
                                      padded_ids.begin() + static_cast<std::ptrdiff_t>(length)));
}

// Per-layer affine projection + tanh of the text representation vector.
template <class A>
std::vector<typename A::V> init_decoder_state(A& alg, const ModelNames& names,
                                              typename A::V s) {
  std::vector<typename A::V> states;
  for (int l = 0; l < 2; ++l) {
    states.push_back(alg.tanh(alg.add(alg.matvec(alg.param(names.dec_init_W[l]), s),
                                      alg.param(names.dec_init_b[l]))));
  }
  return states;
}

}  // namespace e2t
