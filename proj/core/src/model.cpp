#include "e2t/model.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "e2t/checkpoint.hpp"
#include "e2t/search.hpp"
#include "e2t/training.hpp"

namespace e2t {

Summarizer Summarizer::create(RunConfig cfg, Vocabulary src, Vocabulary tgt,
                              Vocabulary ent) {
  cfg.validate();
  Summarizer m;
  m.cfg = std::move(cfg);
  m.src_vocab = std::move(src);
  m.tgt_vocab = std::move(tgt);
  m.ent_vocab = std::move(ent);
  Rng rng(m.cfg.seed);
  m.params = build_parameters(m.cfg, m.src_vocab.size(), m.tgt_vocab.size(),
                              m.ent_vocab.size(), rng);
  return m;
}

std::vector<int> Summarizer::source_ids(const AnnotatedDocument& doc) const {
  std::vector<int> ids;
  ids.reserve(doc.source_tokens.size());
  for (const std::string& t : doc.source_tokens) ids.push_back(src_vocab.id(t));
  return ids;
}

std::vector<int> Summarizer::entity_ids(const AnnotatedDocument& doc) const {
  std::vector<int> ids;
  ids.reserve(doc.entities.size());
  for (const EntityMention& m : doc.entities) ids.push_back(ent_vocab.id(m.entity_id));
  return ids;
}

std::vector<int> Summarizer::target_ids_with_eos(const AnnotatedDocument& doc) const {
  std::vector<int> ids;
  ids.reserve(doc.target_tokens.size() + 1);
  for (const std::string& t : doc.target_tokens) ids.push_back(tgt_vocab.id(t));
  ids.push_back(Vocabulary::kEos);
  return ids;
}

Summarizer::LossGraph Summarizer::loss_graph(Tape& tape, const AnnotatedDocument& doc,
                                             Rng* dropout_rng) const {
  TrainAlgebra alg{tape, params, dropout_rng, dropout_rng ? cfg.dropout : 0.0};
  auto steps = teacher_forced_steps(alg, names, cfg, source_ids(doc), entity_ids(doc),
                                    target_ids_with_eos(doc));
  LossGraph out;
  out.step_logits = steps.logits;
  out.attention_queries = steps.attention_queries;
  out.loss = nll_loss(tape, steps.logits, target_ids_with_eos(doc));
  return out;
}

std::vector<Tensor> Summarizer::forced_logits(const AnnotatedDocument& doc) const {
  EvalAlgebra alg{params};
  auto steps = teacher_forced_steps(alg, names, cfg, source_ids(doc), entity_ids(doc),
                                    target_ids_with_eos(doc));
  return steps.logits;
}

std::pair<double, std::size_t> Summarizer::document_nll(const AnnotatedDocument& doc) const {
  const std::vector<int> targets = target_ids_with_eos(doc);
  const std::vector<Tensor> logits = forced_logits(doc);
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t] == Vocabulary::kPad) continue;
    total -= k_log_softmax(logits[t]).at(static_cast<std::size_t>(targets[t]));
    ++counted;
  }
  return {total, counted};
}

// ---------------------------------------------------------------------------

Summarizer::Session::Session(const Summarizer& model, std::vector<int> source_ids,
                             std::vector<int> entity_ids)
    : model_(model) {
  EvalAlgebra alg{model.params};
  EncoderOutput<EvalAlgebra> enc =
      encode_text(alg, model.names, model.cfg.state, source_ids);
  H_ = enc.H;
  pre_ = attention_precompute(alg, model.names, enc.H);
  if (model.cfg.use_e2t) {
    TopicResult<EvalAlgebra> tr =
        entity_topic_vector(alg, model.names, model.cfg, entity_ids, enc.s);
    topic_ = tr.topic;
    has_topic_ = true;
  }
  std::vector<Tensor> states = init_decoder_state(alg, model.names, enc.s);
  init_.s1 = states[0];
  init_.s2 = states[1];
  init_.c = Tensor::zeros({2 * model.cfg.state});
}

std::pair<Tensor, Summarizer::DecodeState> Summarizer::Session::step(
    const DecodeState& state, int y_prev) const {
  EvalAlgebra alg{model_.params};
  std::optional<Tensor> topic;
  if (has_topic_) topic = topic_;
  DecoderStep<EvalAlgebra> out = decoder_step(alg, model_.names, y_prev, state.s1,
                                              state.s2, state.c, H_, pre_, topic);
  DecodeState next{out.state_l1, out.state_l2, out.context};
  return {k_log_softmax(out.logits), std::move(next)};
}

Summarizer::Session Summarizer::session(const AnnotatedDocument& doc) const {
  return Session(*this, source_ids(doc), entity_ids(doc));
}

std::vector<int> Summarizer::summarize_ids(const AnnotatedDocument& doc, std::size_t beam,
                                           std::size_t max_len) const {
  Session sess = session(doc);
  auto step = [&sess](const DecodeState& st, int tok) { return sess.step(st, tok); };
  BeamHypothesis best =
      beam_search<DecodeState>(sess.init(), step, Vocabulary::kBos, Vocabulary::kEos,
                               beam, max_len, cfg.length_norm);
  return best.tokens;
}

std::vector<std::string> Summarizer::summarize(const AnnotatedDocument& doc,
                                               std::size_t beam,
                                               std::size_t max_len) const {
  std::vector<std::string> tokens;
  for (int id : summarize_ids(doc, beam, max_len)) tokens.push_back(tgt_vocab.token(id));
  return tokens;
}

std::vector<std::string> Summarizer::summarize(const AnnotatedDocument& doc) const {
  return summarize(doc, cfg.beam, cfg.max_len);
}

// ---------------------------------------------------------------------------

void Summarizer::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_checkpoint(params, (fs::path(dir) / "params.e2t").string());
  std::ofstream cfg_out(fs::path(dir) / "model.cfg");
  if (!cfg_out) throw std::runtime_error("cannot write " + dir + "/model.cfg");
  cfg_out << config_to_text(cfg);
  src_vocab.save((fs::path(dir) / "vocab.src.txt").string());
  tgt_vocab.save((fs::path(dir) / "vocab.tgt.txt").string());
  ent_vocab.save((fs::path(dir) / "vocab.ent.txt").string());
}

Summarizer Summarizer::load(const std::string& dir) {
  namespace fs = std::filesystem;
  Summarizer m;
  m.cfg = load_config((fs::path(dir) / "model.cfg").string());
  m.src_vocab = Vocabulary::load((fs::path(dir) / "vocab.src.txt").string());
  m.tgt_vocab = Vocabulary::load((fs::path(dir) / "vocab.tgt.txt").string());
  m.ent_vocab = Vocabulary::load((fs::path(dir) / "vocab.ent.txt").string());
  m.params = load_checkpoint((fs::path(dir) / "params.e2t").string());
  return m;
}

}  // namespace e2t
