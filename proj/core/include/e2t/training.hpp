#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <vector>

#include "e2t/model.hpp"
#include "e2t/optim.hpp"

namespace e2t {

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mean over non-PAD target positions of -log softmax(logits)[target].
Tape::Var nll_loss(Tape& tape, const std::vector<Tape::Var>& step_logits,
                   const std::vector<int>& targets);
double nll_loss_value(const std::vector<Tensor>& step_logits,
                      const std::vector<int>& targets);

// exp of the corpus-level mean teacher-forced NLL per non-PAD token.
double perplexity(const Summarizer& model, const std::vector<AnnotatedDocument>& docs);

// Fraction of non-PAD target positions whose argmax logit hits the target.
double token_accuracy(const Summarizer& model, const std::vector<AnnotatedDocument>& docs);

// Patience-based minimization stopper: stop after `patience` consecutive
// observations that fail to improve on the best seen.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // returns true when training should stop after this observation
  bool observe(double value) {
    ++count_;
    if (value < best_) {
      best_ = value;
      best_index_ = count_;
      streak_ = 0;
      return false;
    }
    return ++streak_ >= patience_;
  }

  double best() const { return best_; }
  std::size_t best_index() const { return best_index_; }  // 1-based

 private:
  std::size_t patience_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t best_index_ = 0;
  std::size_t streak_ = 0;
  std::size_t count_ = 0;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_perplexity = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  ParamMap best_params;
  std::vector<EpochLog> log;
  double best_dev_perplexity = 0.0;
  std::size_t best_epoch = 0;
};

// Teacher-forced NLL training with Adadelta, the row-wise max-norm constraint
// after every update, shuffled mini-batches, and dev-perplexity early
// stopping. The model is left holding the best-dev parameters. Non-finite
// losses raise DivergenceError.
TrainResult train_model(Summarizer& model, const std::vector<AnnotatedDocument>& train_docs,
                        const std::vector<AnnotatedDocument>& dev_docs,
                        std::ostream* log_stream = nullptr);

std::string format_epoch_log(const EpochLog& entry);

// The k-tuning stopping rule: walk the strictly increasing candidates in
// order and stop at the first whose dev perplexity exceeds the previous
// candidate's, returning that previous candidate; otherwise the last one.
std::size_t tune_k_select(const std::vector<std::size_t>& candidates,
                          const std::function<double(std::size_t)>& dev_perplexity_of);

struct TuneKResult {
  std::size_t k = 0;
  std::vector<std::pair<std::size_t, double>> trials;  // (candidate, dev ppl)
};

// Trains one capped-budget model per candidate (fresh parameters, same seed)
// and applies tune_k_select. Lazy: stops training as soon as the rule fires.
TuneKResult tune_k(const RunConfig& base, const std::vector<AnnotatedDocument>& train_docs,
                   const std::vector<AnnotatedDocument>& dev_docs,
                   const std::vector<std::size_t>& candidates,
                   std::ostream* log_stream = nullptr);

struct CorpusVocabs {
  Vocabulary src, tgt, ent;
};
CorpusVocabs build_vocabularies(const std::vector<AnnotatedDocument>& docs,
                                std::size_t cap);

}  // namespace e2t
