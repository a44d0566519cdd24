#pragma once

#include <optional>
#include <string>
#include <vector>

#include "e2t/config.hpp"
#include "e2t/corpus.hpp"
#include "e2t/decoder.hpp"
#include "e2t/vocab.hpp"

namespace e2t {

// Whole teacher-forced pass, written once over an algebra. `targets` already
// carries the EOS id at the end; the step inputs are BOS followed by the
// targets shifted right. One attention query runs per predicted position.
template <class A>
struct TeacherForcedSteps {
  std::vector<typename A::V> logits;          // one per predicted position
  typename A::V topic;                        // meaningful when use_e2t
  bool has_topic = false;
  std::size_t attention_queries = 0;
};

template <class A>
TeacherForcedSteps<A> teacher_forced_steps(A& alg, const ModelNames& names,
                                           const RunConfig& cfg,
                                           const std::vector<int>& source_ids,
                                           const std::vector<int>& entity_ids,
                                           const std::vector<int>& targets_with_eos) {
  using V = typename A::V;
  if (targets_with_eos.empty()) {
    throw std::invalid_argument("teacher_forced_steps: empty target");
  }
  EncoderOutput<A> enc = encode_text(alg, names, cfg.state, source_ids);
  TeacherForcedSteps<A> out;
  std::optional<V> topic;
  if (cfg.use_e2t) {
    TopicResult<A> tr = entity_topic_vector(alg, names, cfg, entity_ids, enc.s);
    topic = tr.topic;
    out.topic = tr.topic;
    out.has_topic = true;
  }
  std::vector<V> states = init_decoder_state(alg, names, enc.s);
  V s1 = states[0];
  V s2 = states[1];
  V c = alg.constant(Tensor::zeros({2 * cfg.state}));
  V pre = attention_precompute(alg, names, enc.H);
  int y_prev = Vocabulary::kBos;
  out.logits.reserve(targets_with_eos.size());
  for (int target : targets_with_eos) {
    DecoderStep<A> step =
        decoder_step(alg, names, y_prev, s1, s2, c, enc.H, pre, topic);
    out.logits.push_back(step.logits);
    ++out.attention_queries;
    s1 = step.state_l1;
    s2 = step.state_l2;
    c = step.context;
    y_prev = target;
  }
  return out;
}

// Assembled summarizer: config, vocabularies, parameters.
class Summarizer {
 public:
  RunConfig cfg;
  Vocabulary src_vocab;
  Vocabulary tgt_vocab;
  Vocabulary ent_vocab;
  ParamMap params;
  ModelNames names = ModelNames::make();

  // Fresh model with randomly initialized parameters (seeded by cfg.seed).
  static Summarizer create(RunConfig cfg, Vocabulary src, Vocabulary tgt,
                           Vocabulary ent);

  std::vector<int> source_ids(const AnnotatedDocument& doc) const;
  std::vector<int> entity_ids(const AnnotatedDocument& doc) const;
  std::vector<int> target_ids_with_eos(const AnnotatedDocument& doc) const;

  // Training-path forward; returns the scalar mean NLL over target positions.
  struct LossGraph {
    Tape::Var loss;
    std::vector<Tape::Var> step_logits;
    std::size_t attention_queries = 0;
  };
  LossGraph loss_graph(Tape& tape, const AnnotatedDocument& doc,
                       Rng* dropout_rng = nullptr) const;

  // Plain-tensor teacher forcing for evaluation.
  std::vector<Tensor> forced_logits(const AnnotatedDocument& doc) const;
  // Sum of per-token NLL and the token count for corpus perplexity.
  std::pair<double, std::size_t> document_nll(const AnnotatedDocument& doc) const;

  // Incremental decoding over a fixed source.
  struct DecodeState {
    Tensor s1, s2, c;
  };
  class Session {
   public:
    Session(const Summarizer& model, std::vector<int> source_ids,
            std::vector<int> entity_ids);
    DecodeState init() const { return init_; }
    // log-probabilities over the target vocabulary for the next position
    std::pair<Tensor, DecodeState> step(const DecodeState& state, int y_prev) const;
    const Tensor& topic() const { return topic_; }

   private:
    const Summarizer& model_;
    Tensor H_, pre_, topic_;
    bool has_topic_ = false;
    DecodeState init_;
  };
  Session session(const AnnotatedDocument& doc) const;

  std::vector<int> summarize_ids(const AnnotatedDocument& doc, std::size_t beam,
                                 std::size_t max_len) const;
  std::vector<std::string> summarize(const AnnotatedDocument& doc) const;
  std::vector<std::string> summarize(const AnnotatedDocument& doc, std::size_t beam,
                                     std::size_t max_len) const;

  // Model directory: params.e2t, model.cfg, vocab.{src,tgt,ent}.txt
  void save(const std::string& dir) const;
  static Summarizer load(const std::string& dir);
};

}  // namespace e2t
