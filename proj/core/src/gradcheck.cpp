#include "e2t/gradcheck.hpp"

#include <cmath>
#include <sstream>

#include "e2t/model.hpp"
#include "e2t/training.hpp"

namespace e2t {

double finite_difference_max_error(const ForwardBuilder& forward, ParamMap& params,
                                   double step) {
  GradMap analytic;
  {
    Tape tape;
    Tape::Var loss = forward(tape, params);
    analytic = tape.backward(loss);
  }
  auto eval = [&]() {
    Tape tape;
    return tape.value(forward(tape, params)).scalar_value();
  };
  double max_err = 0.0;
  for (auto& [name, tensor] : params) {
    auto git = analytic.find(name);
    if (git == analytic.end()) continue;  // unused by this graph
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double orig = tensor.at(i);
      tensor.mut()[i] = orig + step;
      const double f_plus = eval();
      tensor.mut()[i] = orig - step;
      const double f_minus = eval();
      tensor.mut()[i] = orig;
      const double fd = (f_plus - f_minus) / (2.0 * step);
      const double a = git->second.at(i);
      const double err = std::abs(a - fd) / (std::abs(a) + std::abs(fd) + 1e-4);
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

namespace {

constexpr double kOpTol = 1e-4;
constexpr double kEndToEndTol = 1e-3;

Tensor random_tensor(Shape shape, Rng& rng, double bound = 0.8) {
  Tensor t(std::move(shape));
  double* p = t.mut();
  for (std::size_t i = 0; i < t.size(); ++i) p[i] = rng.uniform(-bound, bound);
  return t;
}

// Reduces an arbitrary-shape output to a scalar through fixed random weights
// so the whole Jacobian gets mixed into the check.
Tape::Var reduce(Tape& tape, Tape::Var v, const Tensor& weights) {
  return tape.sum(tape.mul(v, tape.constant(weights)));
}

struct Case {
  std::string name;
  double tol = kOpTol;
  ParamMap params;
  ForwardBuilder forward;
};

RunConfig tiny_config(bool use_e2t, EntityEncoderKind enc, PoolingKind pool, bool gate,
                      std::size_t k) {
  RunConfig cfg;
  cfg.word_dim = 4;
  cfg.entity_dim = 5;
  cfg.state = 3;
  cfg.att_dim = 3;
  cfg.out_dim = 4;
  cfg.e2t_state = 3;
  cfg.cnn_filters = {{2, 3}, {3, 4}};
  cfg.use_e2t = use_e2t;
  cfg.e2t_encoder = enc;
  cfg.e2t_pooling = pool;
  cfg.e2t_gate = gate;
  cfg.e2t_k = k;
  cfg.dropout = 0.0;
  cfg.batch_size = 1;
  return cfg;
}

constexpr std::size_t kSrcVocab = 9, kTgtVocab = 8, kEntVocab = 7;
const std::vector<int> kSourceIds = {1, 4, 2, 5};
const std::vector<int> kEntityIds = {1, 2, 3};
const std::vector<int> kTargets = {4, 5, 6, 3};  // ends in EOS

// Score separation for the firm-attention case: with step 1e-5 a 1e-3 gap
// keeps the top-k selection stable across perturbed evaluations.
bool firm_scores_separated(const RunConfig& cfg, const ParamMap& params,
                           std::size_t k) {
  EvalAlgebra alg{params};
  const ModelNames names = ModelNames::make();
  std::vector<Tensor> ids;
  const Tensor& emb = params.at(names.emb_ent);
  std::vector<Tensor> entities;
  for (int id : kEntityIds) entities.push_back(k_row(emb, static_cast<std::size_t>(id)));
  std::vector<Tensor> encoded =
      cfg.e2t_encoder == EntityEncoderKind::rnn
          ? encode_entities_rnn(alg, names, cfg.e2t_state, entities)
          : encode_entities_cnn(alg, cfg.entity_dim, cfg.cnn_filters, entities);
  std::vector<Tensor> items;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    items.push_back(cfg.e2t_gate ? selective_disambiguation(alg, names, entities[i],
                                                            encoded[i], false)
                                 : encoded[i]);
  }
  Tensor ctx = Tensor::zeros({2 * cfg.state});
  Tensor stacked = EvalAlgebra::stack_rows(items);
  Tensor scores =
      k_matvec(k_tanh(k_add_row_broadcast(k_matmul_nt(stacked, params.at(names.e2t_attn_Wa)),
                                          k_matvec(params.at(names.e2t_attn_Ua), ctx))),
               params.at(names.e2t_attn_va));
  std::vector<double> g(scores.data(), scores.data() + scores.size());
  std::sort(g.begin(), g.end(), std::greater<>());
  if (k >= g.size()) return true;
  return g[k - 1] - g[k] > 1e-3;
}

void add_primitive_cases(std::vector<Case>& cases, Rng& rng) {
  const Tensor w5 = random_tensor({5}, rng, 1.0);
  const Tensor w4 = random_tensor({4}, rng, 1.0);
  const Tensor w45 = random_tensor({4, 5}, rng, 1.0);
  const Tensor w35 = random_tensor({3, 5}, rng, 1.0);
  const Tensor w25 = random_tensor({2, 5}, rng, 1.0);
  const Tensor w15 = random_tensor({15}, rng, 1.0);

  auto vec_params = [&](std::size_t n) {
    ParamMap p;
    p.emplace("x", random_tensor({n}, rng));
    p.emplace("y", random_tensor({n}, rng));
    return p;
  };

  cases.push_back({"add", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     return reduce(t, t.add(t.param("x", p), t.param("y", p)), w5);
                   }});
  cases.push_back({"mul", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     return reduce(t, t.mul(t.param("x", p), t.param("y", p)), w5);
                   }});
  cases.push_back({"one_minus", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     return reduce(t, t.one_minus(t.param("x", p)), w5);
                   }});
  cases.push_back({"scale", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     return reduce(t, t.scale(t.param("x", p), 1.7), w5);
                   }});
  cases.push_back({"scale_by", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     return reduce(
                         t, t.scale_by(t.param("x", p), t.pick(t.param("y", p), 1)), w5);
                   }});
  cases.push_back({"sigmoid", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     return reduce(t, t.sigmoid(t.param("x", p)), w5);
                   }});
  cases.push_back({"tanh", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     return reduce(t, t.tanh(t.param("x", p)), w5);
                   }});
  cases.push_back({"softmax", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     return reduce(t, t.softmax(t.param("x", p)), w5);
                   }});
  cases.push_back({"log_softmax", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     return reduce(t, t.log_softmax(t.param("x", p)), w5);
                   }});
  cases.push_back({"pick", kOpTol, vec_params(5), [](Tape& t, const ParamMap& p) {
                     return t.pick(t.param("x", p), 2);
                   }});
  cases.push_back({"dot", kOpTol, vec_params(5), [](Tape& t, const ParamMap& p) {
                     return t.dot(t.param("x", p), t.param("y", p));
                   }});
  cases.push_back({"sum", kOpTol, vec_params(5), [](Tape& t, const ParamMap& p) {
                     return t.sum(t.param("x", p));
                   }});
  cases.push_back({"mean", kOpTol, vec_params(5), [](Tape& t, const ParamMap& p) {
                     return t.mean(t.param("x", p));
                   }});

  {
    ParamMap p;
    p.emplace("M", random_tensor({4, 5}, rng));
    p.emplace("x", random_tensor({5}, rng));
    cases.push_back({"matvec", kOpTol, std::move(p), [w4](Tape& t, const ParamMap& p2) {
                       return reduce(t, t.matvec(t.param("M", p2), t.param("x", p2)), w4);
                     }});
  }
  {
    ParamMap p;
    p.emplace("M", random_tensor({4, 5}, rng));
    p.emplace("a", random_tensor({4}, rng));
    cases.push_back({"matvec_t", kOpTol, std::move(p), [w5](Tape& t, const ParamMap& p2) {
                       return reduce(t, t.matvec_t(t.param("M", p2), t.param("a", p2)), w5);
                     }});
  }
  {
    ParamMap p;
    p.emplace("A", random_tensor({4, 3}, rng));
    p.emplace("B", random_tensor({5, 3}, rng));
    cases.push_back({"matmul_nt", kOpTol, std::move(p), [w45](Tape& t, const ParamMap& p2) {
                       return reduce(t, t.matmul_nt(t.param("A", p2), t.param("B", p2)),
                                     w45);
                     }});
  }
  {
    ParamMap p;
    p.emplace("M", random_tensor({3, 5}, rng));
    p.emplace("v", random_tensor({5}, rng));
    cases.push_back(
        {"add_row_broadcast", kOpTol, std::move(p), [w35](Tape& t, const ParamMap& p2) {
           return reduce(t, t.add_row_broadcast(t.param("M", p2), t.param("v", p2)), w35);
         }});
  }
  {
    ParamMap p;
    p.emplace("x", random_tensor({5}, rng));
    p.emplace("y", random_tensor({5}, rng));
    p.emplace("z", random_tensor({5}, rng));
    cases.push_back({"concat", kOpTol, std::move(p), [w15](Tape& t, const ParamMap& p2) {
                       return reduce(t,
                                     t.concat({t.param("x", p2), t.param("y", p2),
                                               t.param("z", p2)}),
                                     w15);
                     }});
  }
  {
    ParamMap p;
    p.emplace("x", random_tensor({5}, rng));
    p.emplace("y", random_tensor({5}, rng));
    cases.push_back({"stack_rows", kOpTol, std::move(p), [w25](Tape& t, const ParamMap& p2) {
                       return reduce(t, t.stack_rows({t.param("x", p2), t.param("y", p2)}),
                                     w25);
                     }});
  }
  {
    ParamMap p;
    p.emplace("M", random_tensor({4, 5}, rng));
    cases.push_back({"row", kOpTol, std::move(p), [w5](Tape& t, const ParamMap& p2) {
                       return reduce(t, t.row(t.param("M", p2), 1), w5);
                     }});
  }
  cases.push_back({"dropout", kOpTol, vec_params(5), [w5](Tape& t, const ParamMap& p) {
                     Rng mask_rng(7);  // reseeded per evaluation: mask stays fixed
                     return reduce(t, t.dropout(t.param("x", p), 0.5, mask_rng), w5);
                   }});
}

void add_recurrent_cases(std::vector<Case>& cases, Rng& rng) {
  const GruNames g = gru_names("g");
  auto gru_params = [&](std::size_t state, std::size_t input) {
    ParamMap p;
    p.emplace(g.Wz, random_tensor({state, input}, rng));
    p.emplace(g.Uz, random_tensor({state, state}, rng));
    p.emplace(g.bz, random_tensor({state}, rng));
    p.emplace(g.Wr, random_tensor({state, input}, rng));
    p.emplace(g.Ur, random_tensor({state, state}, rng));
    p.emplace(g.br, random_tensor({state}, rng));
    p.emplace(g.Wh, random_tensor({state, input}, rng));
    p.emplace(g.Uh, random_tensor({state, state}, rng));
    p.emplace(g.bh, random_tensor({state}, rng));
    return p;
  };

  {
    ParamMap p = gru_params(3, 4);
    p.emplace("x", random_tensor({4}, rng));
    p.emplace("h", random_tensor({3}, rng));
    const Tensor w3 = random_tensor({3}, rng, 1.0);
    cases.push_back({"gru_cell", kOpTol, std::move(p), [g, w3](Tape& t, const ParamMap& p2) {
                       TrainAlgebra alg{t, p2};
                       return reduce(t, gru_cell(alg, g, t.param("x", p2), t.param("h", p2)),
                                     w3);
                     }});
  }
  {
    const GruNames gf = gru_names("f");
    const GruNames gb = gru_names("b");
    ParamMap p;
    for (const GruNames& n : {gf, gb}) {
      p.emplace(n.Wz, random_tensor({3, 4}, rng));
      p.emplace(n.Uz, random_tensor({3, 3}, rng));
      p.emplace(n.bz, random_tensor({3}, rng));
      p.emplace(n.Wr, random_tensor({3, 4}, rng));
      p.emplace(n.Ur, random_tensor({3, 3}, rng));
      p.emplace(n.br, random_tensor({3}, rng));
      p.emplace(n.Wh, random_tensor({3, 4}, rng));
      p.emplace(n.Uh, random_tensor({3, 3}, rng));
      p.emplace(n.bh, random_tensor({3}, rng));
    }
    for (int i = 0; i < 3; ++i) {
      p.emplace("x" + std::to_string(i), random_tensor({4}, rng));
    }
    const Tensor w = random_tensor({18}, rng, 1.0);
    cases.push_back(
        {"bigru_layer", kOpTol, std::move(p), [gf, gb, w](Tape& t, const ParamMap& p2) {
           TrainAlgebra alg{t, p2};
           std::vector<Tape::Var> xs = {t.param("x0", p2), t.param("x1", p2),
                                        t.param("x2", p2)};
           BiGruStates<TrainAlgebra> states = bigru_layer(alg, gf, gb, xs, 3);
           std::vector<Tape::Var> all;
           for (auto& v : states.fwd) all.push_back(v);
           for (auto& v : states.bwd) all.push_back(v);
           return reduce(t, t.concat(all), w);
         }});
  }
}

void add_model_cases(std::vector<Case>& cases, Rng& rng) {
  const ModelNames names = ModelNames::make();

  {
    RunConfig cfg = tiny_config(false, EntityEncoderKind::cnn, PoolingKind::soft, false, 1);
    Rng prng(rng.next());
    ParamMap p = build_parameters(cfg, kSrcVocab, kTgtVocab, kEntVocab, prng);
    const Tensor wH = random_tensor({kSourceIds.size(), 2 * cfg.state}, rng, 1.0);
    const Tensor ws = random_tensor({2 * cfg.state}, rng, 1.0);
    cases.push_back(
        {"encode_text", kOpTol, p, [names, cfg, wH, ws](Tape& t, const ParamMap& p2) {
           TrainAlgebra alg{t, p2};
           EncoderOutput<TrainAlgebra> enc = encode_text(alg, names, cfg.state, kSourceIds);
           return t.add(reduce(t, enc.H, wH), reduce(t, enc.s, ws));
         }});
    const Tensor w6 = random_tensor({2 * cfg.state}, rng, 1.0);
    ParamMap p_init = build_parameters(cfg, kSrcVocab, kTgtVocab, kEntVocab, prng);
    p_init.emplace("s", random_tensor({2 * cfg.state}, rng));
    const Tensor w3a = random_tensor({cfg.state}, rng, 1.0);
    const Tensor w3b = random_tensor({cfg.state}, rng, 1.0);
    cases.push_back({"init_decoder_state", kOpTol, std::move(p_init),
                     [names, w3a, w3b](Tape& t, const ParamMap& p2) {
                       TrainAlgebra alg{t, p2};
                       auto states = init_decoder_state(alg, names, t.param("s", p2));
                       return t.add(reduce(t, states[0], w3a), reduce(t, states[1], w3b));
                     }});
    ParamMap p_att = build_parameters(cfg, kSrcVocab, kTgtVocab, kEntVocab, prng);
    p_att.emplace("H", random_tensor({4, 2 * cfg.state}, rng));
    p_att.emplace("q", random_tensor({cfg.state}, rng));
    const Tensor wc = random_tensor({2 * cfg.state}, rng, 1.0);
    const Tensor wa = random_tensor({4}, rng, 1.0);
    cases.push_back({"additive_attention", kOpTol, std::move(p_att),
                     [names, wc, wa](Tape& t, const ParamMap& p2) {
                       TrainAlgebra alg{t, p2};
                       Tape::Var H = t.param("H", p2);
                       Tape::Var pre = attention_precompute(alg, names, H);
                       AttentionResult<TrainAlgebra> att =
                           additive_attention(alg, names, H, pre, t.param("q", p2));
                       return t.add(reduce(t, att.context, wc), reduce(t, att.weights, wa));
                     }});
    ParamMap p_step = build_parameters(cfg, kSrcVocab, kTgtVocab, kEntVocab, prng);
    p_step.emplace("H", random_tensor({4, 2 * cfg.state}, rng));
    p_step.emplace("s1", random_tensor({cfg.state}, rng));
    p_step.emplace("s2", random_tensor({cfg.state}, rng));
    p_step.emplace("c", random_tensor({2 * cfg.state}, rng));
    const Tensor wl = random_tensor({kTgtVocab}, rng, 1.0);
    cases.push_back({"decoder_step", kOpTol, std::move(p_step),
                     [names, wl](Tape& t, const ParamMap& p2) {
                       TrainAlgebra alg{t, p2};
                       Tape::Var H = t.param("H", p2);
                       Tape::Var pre = attention_precompute(alg, names, H);
                       DecoderStep<TrainAlgebra> step = decoder_step(
                           alg, names, 2, t.param("s1", p2), t.param("s2", p2),
                           t.param("c", p2), H, pre, std::nullopt);
                       return reduce(t, step.logits, wl);
                     }});
  }

  // selective disambiguation gate, scalar and vector variants
  for (bool vector_gate : {false, true}) {
    RunConfig cfg = tiny_config(true, EntityEncoderKind::cnn, PoolingKind::soft, true, 1);
    cfg.e2t_vector_gate = vector_gate;
    Rng prng(rng.next());
    ParamMap p = build_parameters(cfg, kSrcVocab, kTgtVocab, kEntVocab, prng);
    p.emplace("e", random_tensor({cfg.entity_dim}, rng));
    p.emplace("ep", random_tensor({cfg.entity_encoding_dim()}, rng));
    const Tensor w = random_tensor({cfg.entity_encoding_dim()}, rng, 1.0);
    cases.push_back({vector_gate ? "selective_gate_vector" : "selective_gate", kOpTol,
                     std::move(p), [names, vector_gate, w](Tape& t, const ParamMap& p2) {
                       TrainAlgebra alg{t, p2};
                       return reduce(t,
                                     selective_disambiguation(alg, names,
                                                              t.param("e", p2),
                                                              t.param("ep", p2),
                                                              vector_gate),
                                     w);
                     }});
  }

  struct PipelineSpec {
    const char* name;
    EntityEncoderKind enc;
    PoolingKind pool;
    bool gate;
    std::size_t k;
  };
  const PipelineSpec pipelines[] = {
      {"entity_rnn_soft", EntityEncoderKind::rnn, PoolingKind::soft, false, 1},
      {"entity_rnn_firm_gate", EntityEncoderKind::rnn, PoolingKind::firm, true, 2},
      {"entity_cnn_soft_gate", EntityEncoderKind::cnn, PoolingKind::soft, true, 1},
      {"entity_cnn_firm", EntityEncoderKind::cnn, PoolingKind::firm, false, 2},
  };
  for (const PipelineSpec& spec : pipelines) {
    RunConfig cfg = tiny_config(true, spec.enc, spec.pool, spec.gate, spec.k);
    ParamMap p;
    // resample until the firm top-k selection sits clear of the FD step
    for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
      Rng prng(rng.next());
      p = build_parameters(cfg, kSrcVocab, kTgtVocab, kEntVocab, prng);
      if (spec.pool != PoolingKind::firm || firm_scores_separated(cfg, p, spec.k)) break;
    }
    const Tensor w = random_tensor({cfg.topic_dim()}, rng, 1.0);
    cases.push_back({spec.name, kOpTol, std::move(p), [names, cfg, w](Tape& t,
                                                                      const ParamMap& p2) {
                       TrainAlgebra alg{t, p2};
                       Tape::Var ctx = t.constant(Tensor::zeros({2 * cfg.state}));
                       TopicResult<TrainAlgebra> topic =
                           entity_topic_vector(alg, names, cfg, kEntityIds, ctx);
                       return reduce(t, topic.topic, w);
                     }});
  }

  struct EndToEndSpec {
    const char* name;
    bool use_e2t;
    EntityEncoderKind enc;
    PoolingKind pool;
    bool gate;
    std::size_t k;
  };
  const EndToEndSpec full[] = {
      {"end_to_end_base", false, EntityEncoderKind::cnn, PoolingKind::soft, false, 1},
      {"end_to_end_e2t_cnn_firm", true, EntityEncoderKind::cnn, PoolingKind::firm, true, 2},
      {"end_to_end_e2t_rnn_soft", true, EntityEncoderKind::rnn, PoolingKind::soft, true, 1},
  };
  for (const EndToEndSpec& spec : full) {
    RunConfig cfg = tiny_config(spec.use_e2t, spec.enc, spec.pool, spec.gate, spec.k);
    Rng prng(rng.next());
    ParamMap p = build_parameters(cfg, kSrcVocab, kTgtVocab, kEntVocab, prng);
    cases.push_back({spec.name, kEndToEndTol, std::move(p),
                     [names, cfg](Tape& t, const ParamMap& p2) {
                       TrainAlgebra alg{t, p2};
                       auto steps = teacher_forced_steps(alg, names, cfg, kSourceIds,
                                                         kEntityIds, kTargets);
                       return nll_loss(t, steps.logits, kTargets);
                     }});
  }
}

}  // namespace

std::vector<GradCheckResult> run_gradient_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Case> cases;
  add_primitive_cases(cases, rng);
  add_recurrent_cases(cases, rng);
  add_model_cases(cases, rng);

  std::vector<GradCheckResult> results;
  results.reserve(cases.size());
  for (Case& c : cases) {
    GradCheckResult r;
    r.name = c.name;
    r.tolerance = c.tol;
    r.max_rel_err = finite_difference_max_error(c.forward, c.params);
    r.pass = r.max_rel_err <= c.tol;
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_gradcheck(const GradCheckResult& r) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(3);
  os << r.name << '\t' << r.max_rel_err << '\t' << (r.pass ? "PASS" : "FAIL");
  return os.str();
}

bool all_passed(const std::vector<GradCheckResult>& results) {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace e2t
