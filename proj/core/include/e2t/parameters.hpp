#pragma once

#include <string>

#include "e2t/config.hpp"
#include "e2t/rng.hpp"
#include "e2t/tape.hpp"

namespace e2t {

// Checkpoint tensor names for one GRU cell.
struct GruNames {
  std::string Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;
};
GruNames gru_names(const std::string& prefix);

// All checkpoint tensor names used by the model:
//   enc.l{1,2}.{fwd,bwd}.*   two-layer bidirectional text encoder
//   dec.init.l{1,2}.{W,b}    decoder state initialization
//   dec.l{1,2}.*, dec.attn.* decoder and its additive attention
//   out.{Ww,Wc,Ws,Wo}        output layer
//   e2t.{rnn,cnn}.*, e2t.gate.*, e2t.attn.*   entity-to-topic module
struct ModelNames {
  std::string emb_src = "emb.src";
  std::string emb_tgt = "emb.tgt";
  std::string emb_ent = "emb.ent";
  GruNames enc_l1_fwd, enc_l1_bwd, enc_l2_fwd, enc_l2_bwd;
  std::string dec_init_W[2], dec_init_b[2];
  GruNames dec_l1, dec_l2;
  std::string dec_attn_va = "dec.attn.va";
  std::string dec_attn_Wa = "dec.attn.Wa";
  std::string dec_attn_Ua = "dec.attn.Ua";
  std::string out_Ww = "out.Ww", out_Wc = "out.Wc", out_Ws = "out.Ws", out_Wo = "out.Wo";
  GruNames e2t_rnn_fwd, e2t_rnn_bwd;
  std::string e2t_gate_Wd = "e2t.gate.Wd", e2t_gate_bd = "e2t.gate.bd";
  std::string e2t_gate_Wx = "e2t.gate.Wx", e2t_gate_bx = "e2t.gate.bx";
  std::string e2t_gate_Wy = "e2t.gate.Wy", e2t_gate_by = "e2t.gate.by";
  std::string e2t_attn_va = "e2t.attn.va";
  std::string e2t_attn_Wa = "e2t.attn.Wa";
  std::string e2t_attn_Ua = "e2t.attn.Ua";

  static std::string cnn_weight(std::size_t h) {
    return "e2t.cnn.h" + std::to_string(h) + ".W";
  }
  static std::string cnn_bias(std::size_t h) {
    return "e2t.cnn.h" + std::to_string(h) + ".b";
  }

  static ModelNames make();
};

// Scaled uniform init in +/- sqrt(6/(fan_in+fan_out)); biases start at zero.
Tensor init_matrix(std::size_t rows, std::size_t cols, Rng& rng);
Tensor init_vector(std::size_t n, Rng& rng);

// Builds and initializes every parameter the config calls for.
ParamMap build_parameters(const RunConfig& cfg, std::size_t src_vocab,
                          std::size_t tgt_vocab, std::size_t ent_vocab, Rng& rng);

}  // namespace e2t
