#include "e2t/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace e2t {

Tape::Var nll_loss(Tape& tape, const std::vector<Tape::Var>& step_logits,
                   const std::vector<int>& targets) {
  if (step_logits.size() != targets.size()) {
    throw std::invalid_argument("nll_loss: " + std::to_string(step_logits.size()) +
                                " logit steps vs " + std::to_string(targets.size()) +
                                " targets");
  }
  Tape::Var total;
  std::size_t counted = 0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t] == Vocabulary::kPad) continue;
    Tape::Var nll = tape.scale(
        tape.pick(tape.log_softmax(step_logits[t]), static_cast<std::size_t>(targets[t])),
        -1.0);
    total = counted == 0 ? nll : tape.add(total, nll);
    ++counted;
  }
  if (counted == 0) throw std::invalid_argument("nll_loss: all target positions are PAD");
  return tape.scale(total, 1.0 / static_cast<double>(counted));
}

double nll_loss_value(const std::vector<Tensor>& step_logits,
                      const std::vector<int>& targets) {
  if (step_logits.size() != targets.size()) {
    throw std::invalid_argument("nll_loss: " + std::to_string(step_logits.size()) +
                                " logit steps vs " + std::to_string(targets.size()) +
                                " targets");
  }
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t] == Vocabulary::kPad) continue;
    total -= k_log_softmax(step_logits[t]).at(static_cast<std::size_t>(targets[t]));
    ++counted;
  }
  if (counted == 0) throw std::invalid_argument("nll_loss: all target positions are PAD");
  return total / static_cast<double>(counted);
}

double perplexity(const Summarizer& model, const std::vector<AnnotatedDocument>& docs) {
  if (docs.empty()) throw std::invalid_argument("perplexity: empty corpus");
  double total = 0.0;
  std::size_t tokens = 0;
  for (const AnnotatedDocument& doc : docs) {
    const auto [nll, count] = model.document_nll(doc);
    total += nll;
    tokens += count;
  }
  return std::exp(total / static_cast<double>(tokens));
}

double token_accuracy(const Summarizer& model, const std::vector<AnnotatedDocument>& docs) {
  std::size_t hits = 0, total = 0;
  for (const AnnotatedDocument& doc : docs) {
    const std::vector<int> targets = model.target_ids_with_eos(doc);
    const std::vector<Tensor> logits = model.forced_logits(doc);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      if (targets[t] == Vocabulary::kPad) continue;
      const Tensor& l = logits[t];
      std::size_t arg = 0;
      for (std::size_t i = 1; i < l.size(); ++i) {
        if (l.at(i) > l.at(arg)) arg = i;
      }
      hits += arg == static_cast<std::size_t>(targets[t]) ? 1 : 0;
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::string format_epoch_log(const EpochLog& e) {
  std::ostringstream os;
  os << e.epoch << '\t' << e.train_loss << '\t' << e.dev_perplexity << '\t' << e.seconds;
  return os.str();
}

TrainResult train_model(Summarizer& model, const std::vector<AnnotatedDocument>& train_docs,
                        const std::vector<AnnotatedDocument>& dev_docs,
                        std::ostream* log_stream) {
  if (train_docs.empty() || dev_docs.empty()) {
    throw std::invalid_argument("train_model: empty train or dev corpus");
  }
  const RunConfig& cfg = model.cfg;
  Rng rng(cfg.seed);
  AdadeltaState opt;
  EarlyStopper stopper(cfg.patience);
  TrainResult result;
  result.best_params = model.params;
  result.best_dev_perplexity = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(train_docs.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(begin + cfg.batch_size, order.size());
      GradMap batch_grads;
      for (std::size_t i = begin; i < end; ++i) {
        const AnnotatedDocument& doc = train_docs[order[i]];
        Tape tape;
        Summarizer::LossGraph lg = model.loss_graph(tape, doc, &rng);
        const double loss = tape.value(lg.loss).scalar_value();
        if (!std::isfinite(loss)) {
          throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) +
                                ", document '" + doc.id + "'");
        }
        epoch_loss += loss;
        accumulate_grads(batch_grads, tape.backward(lg.loss));
      }
      scale_grads(batch_grads, 1.0 / static_cast<double>(end - begin));
      adadelta_step(model.params, batch_grads, opt);
      apply_maxnorm(model.params);
    }
    epoch_loss /= static_cast<double>(order.size());

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = epoch_loss;
    entry.dev_perplexity = perplexity(model, dev_docs);
    entry.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(entry);
    if (log_stream) *log_stream << format_epoch_log(entry) << '\n';

    const bool stop = stopper.observe(entry.dev_perplexity);
    if (entry.dev_perplexity < result.best_dev_perplexity) {
      result.best_dev_perplexity = entry.dev_perplexity;
      result.best_epoch = epoch;
      result.best_params = model.params;  // storage is copy-on-write
    }
    if (stop) break;
  }
  model.params = result.best_params;
  return result;
}

std::size_t tune_k_select(const std::vector<std::size_t>& candidates,
                          const std::function<double(std::size_t)>& dev_perplexity_of) {
  if (candidates.empty()) throw std::invalid_argument("tune_k: no candidates");
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i] <= candidates[i - 1]) {
      throw std::invalid_argument("tune_k: candidates must be strictly increasing");
    }
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double ppl = dev_perplexity_of(candidates[i]);
    if (i > 0 && ppl > prev) return candidates[i - 1];
    prev = ppl;
  }
  return candidates.back();
}

TuneKResult tune_k(const RunConfig& base, const std::vector<AnnotatedDocument>& train_docs,
                   const std::vector<AnnotatedDocument>& dev_docs,
                   const std::vector<std::size_t>& candidates, std::ostream* log_stream) {
  if (!base.use_e2t) throw std::invalid_argument("tune_k: config has use_e2t=false");
  CorpusVocabs vocabs = build_vocabularies(train_docs, base.vocab_cap);
  TuneKResult result;
  auto eval = [&](std::size_t k) {
    RunConfig cfg = base;
    cfg.e2t_k = k;
    cfg.max_epochs = base.tune_budget;
    Summarizer model = Summarizer::create(cfg, vocabs.src, vocabs.tgt, vocabs.ent);
    train_model(model, train_docs, dev_docs);
    const double ppl = perplexity(model, dev_docs);
    result.trials.emplace_back(k, ppl);
    if (log_stream) *log_stream << "k=" << k << "\tdev_ppl=" << ppl << '\n';
    return ppl;
  };
  result.k = tune_k_select(candidates, eval);
  return result;
}

CorpusVocabs build_vocabularies(const std::vector<AnnotatedDocument>& docs,
                                std::size_t cap) {
  std::vector<std::vector<std::string>> src, tgt, ent;
  for (const AnnotatedDocument& d : docs) {
    src.push_back(d.source_tokens);
    tgt.push_back(d.target_tokens);
    std::vector<std::string> ids;
    for (const EntityMention& m : d.entities) ids.push_back(m.entity_id);
    ent.push_back(std::move(ids));
  }
  return CorpusVocabs{Vocabulary::build(src, cap), Vocabulary::build(tgt, cap),
                      Vocabulary::build(ent, cap)};
}

}  // namespace e2t
