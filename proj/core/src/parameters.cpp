#include "e2t/parameters.hpp"

#include <cmath>

#include "e2t/embeddings.hpp"

namespace e2t {

GruNames gru_names(const std::string& p) {
  return GruNames{p + ".Wz", p + ".Uz", p + ".bz", p + ".Wr", p + ".Ur",
                  p + ".br", p + ".Wh", p + ".Uh", p + ".bh"};
}

ModelNames ModelNames::make() {
  ModelNames n;
  n.enc_l1_fwd = gru_names("enc.l1.fwd");
  n.enc_l1_bwd = gru_names("enc.l1.bwd");
  n.enc_l2_fwd = gru_names("enc.l2.fwd");
  n.enc_l2_bwd = gru_names("enc.l2.bwd");
  n.dec_init_W[0] = "dec.init.l1.W";
  n.dec_init_b[0] = "dec.init.l1.b";
  n.dec_init_W[1] = "dec.init.l2.W";
  n.dec_init_b[1] = "dec.init.l2.b";
  n.dec_l1 = gru_names("dec.l1");
  n.dec_l2 = gru_names("dec.l2");
  n.e2t_rnn_fwd = gru_names("e2t.rnn.fwd");
  n.e2t_rnn_bwd = gru_names("e2t.rnn.bwd");
  return n;
}

Tensor init_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor m({rows, cols});
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  double* p = m.mut();
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = rng.uniform(-bound, bound);
  return m;
}

Tensor init_vector(std::size_t n, Rng& rng) {
  Tensor v({n});
  const double bound = std::sqrt(6.0 / static_cast<double>(n + 1));
  double* p = v.mut();
  for (std::size_t i = 0; i < n; ++i) p[i] = rng.uniform(-bound, bound);
  return v;
}

namespace {

void add_gru(ParamMap& params, const GruNames& n, std::size_t state, std::size_t input,
             Rng& rng) {
  params.emplace(n.Wz, init_matrix(state, input, rng));
  params.emplace(n.Uz, init_matrix(state, state, rng));
  params.emplace(n.bz, Tensor::zeros({state}));
  params.emplace(n.Wr, init_matrix(state, input, rng));
  params.emplace(n.Ur, init_matrix(state, state, rng));
  params.emplace(n.br, Tensor::zeros({state}));
  params.emplace(n.Wh, init_matrix(state, input, rng));
  params.emplace(n.Uh, init_matrix(state, state, rng));
  params.emplace(n.bh, Tensor::zeros({state}));
}

}  // namespace

ParamMap build_parameters(const RunConfig& cfg, std::size_t src_vocab,
                          std::size_t tgt_vocab, std::size_t ent_vocab, Rng& rng) {
  const ModelNames n = ModelNames::make();
  ParamMap params;
  const std::size_t s = cfg.state;

  params.emplace(n.emb_src, random_embedding_matrix(src_vocab, cfg.word_dim, rng));
  params.emplace(n.emb_tgt, random_embedding_matrix(tgt_vocab, cfg.word_dim, rng));

  // encoder: layer 1 reads embeddings, layer 2 reads concatenated states
  add_gru(params, n.enc_l1_fwd, s, cfg.word_dim, rng);
  add_gru(params, n.enc_l1_bwd, s, cfg.word_dim, rng);
  add_gru(params, n.enc_l2_fwd, s, 2 * s, rng);
  add_gru(params, n.enc_l2_bwd, s, 2 * s, rng);

  for (int l = 0; l < 2; ++l) {
    params.emplace(n.dec_init_W[l], init_matrix(s, 2 * s, rng));
    params.emplace(n.dec_init_b[l], Tensor::zeros({s}));
  }

  // decoder: layer 1 reads [word embedding; context]
  add_gru(params, n.dec_l1, s, cfg.word_dim + 2 * s, rng);
  add_gru(params, n.dec_l2, s, s, rng);
  params.emplace(n.dec_attn_Wa, init_matrix(cfg.att_dim, s, rng));
  params.emplace(n.dec_attn_Ua, init_matrix(cfg.att_dim, 2 * s, rng));
  params.emplace(n.dec_attn_va, init_vector(cfg.att_dim, rng));

  const std::size_t out_in = cfg.use_e2t ? s + cfg.topic_dim() : s;
  params.emplace(n.out_Ww, init_matrix(cfg.out_dim, cfg.word_dim, rng));
  params.emplace(n.out_Wc, init_matrix(cfg.out_dim, 2 * s, rng));
  params.emplace(n.out_Ws, init_matrix(cfg.out_dim, out_in, rng));
  params.emplace(n.out_Wo, init_matrix(tgt_vocab, cfg.out_dim, rng));

  if (cfg.use_e2t) {
    params.emplace(n.emb_ent, random_embedding_matrix(ent_vocab, cfg.entity_dim, rng));
    const std::size_t enc_out = cfg.entity_encoding_dim();
    if (cfg.e2t_encoder == EntityEncoderKind::rnn) {
      add_gru(params, n.e2t_rnn_fwd, cfg.e2t_state, cfg.entity_dim, rng);
      add_gru(params, n.e2t_rnn_bwd, cfg.e2t_state, cfg.entity_dim, rng);
    } else {
      for (const auto& [h, maps] : cfg.cnn_filters) {
        params.emplace(ModelNames::cnn_weight(h),
                       init_matrix(maps, h * cfg.entity_dim, rng));
        params.emplace(ModelNames::cnn_bias(h), Tensor::zeros({maps}));
      }
    }
    if (cfg.e2t_gate) {
      const std::size_t gate_out = cfg.e2t_vector_gate ? enc_out : 1;
      params.emplace(n.e2t_gate_Wd, init_matrix(gate_out, enc_out, rng));
      params.emplace(n.e2t_gate_bd, Tensor::zeros({gate_out}));
      params.emplace(n.e2t_gate_Wx, init_matrix(enc_out, cfg.entity_dim, rng));
      params.emplace(n.e2t_gate_bx, Tensor::zeros({enc_out}));
      params.emplace(n.e2t_gate_Wy, init_matrix(enc_out, enc_out, rng));
      params.emplace(n.e2t_gate_by, Tensor::zeros({enc_out}));
    }
    params.emplace(n.e2t_attn_Wa, init_matrix(cfg.att_dim, cfg.topic_dim(), rng));
    params.emplace(n.e2t_attn_Ua, init_matrix(cfg.att_dim, 2 * s, rng));
    params.emplace(n.e2t_attn_va, init_vector(cfg.att_dim, rng));
  }
  return params;
}

}  // namespace e2t
