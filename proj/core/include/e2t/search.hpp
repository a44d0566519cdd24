#pragma once

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <vector>

#include "e2t/tensor.hpp"

namespace e2t {

struct BeamHypothesis {
  std::vector<int> tokens;  // content tokens; EOS is never included
  double logp = 0.0;
};

// Beam search over an incremental scorer.
//
// step(state, y_prev) returns log-probabilities over the vocabulary for the
// next position plus the successor state. Each round expands every live
// hypothesis over the whole vocabulary and keeps the top `beam` candidates by
// total log-probability (ties broken by token id, then hypothesis order).
// Candidates that picked EOS retire into a pool; hypotheses still alive at
// max_len are closed by scoring a forced EOS. The best pooled hypothesis
// wins; with length_norm the comparison divides by the output length + 1.
template <class State>
BeamHypothesis beam_search(
    const State& init,
    const std::function<std::pair<Tensor, State>(const State&, int)>& step, int bos,
    int eos, std::size_t beam, std::size_t max_len, bool length_norm = false) {
  if (beam == 0) throw std::invalid_argument("beam_search: beam must be positive");
  if (max_len == 0) throw std::invalid_argument("beam_search: max_len must be positive");

  struct Hyp {
    std::vector<int> tokens;
    double logp = 0.0;
    State state;
    int last = -1;
  };
  std::vector<Hyp> live;
  live.push_back(Hyp{{}, 0.0, init, bos});
  std::vector<BeamHypothesis> pool;

  struct Candidate {
    double logp;
    std::size_t hyp;
    int token;
  };

  for (std::size_t t = 0; t < max_len && !live.empty(); ++t) {
    std::vector<std::pair<Tensor, State>> expansions;
    expansions.reserve(live.size());
    std::vector<Candidate> candidates;
    for (std::size_t h = 0; h < live.size(); ++h) {
      expansions.push_back(step(live[h].state, live[h].last));
      const Tensor& logp = expansions.back().first;
      for (std::size_t tok = 0; tok < logp.size(); ++tok) {
        candidates.push_back(
            Candidate{live[h].logp + logp.at(tok), h, static_cast<int>(tok)});
      }
    }
    const std::size_t keep = std::min(beam, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(),
                      [](const Candidate& a, const Candidate& b) {
                        if (a.logp != b.logp) return a.logp > b.logp;
                        if (a.token != b.token) return a.token < b.token;
                        return a.hyp < b.hyp;
                      });
    std::vector<Hyp> next;
    next.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      const Candidate& c = candidates[i];
      if (c.token == eos) {
        pool.push_back(BeamHypothesis{live[c.hyp].tokens, c.logp});
        continue;
      }
      Hyp h;
      h.tokens = live[c.hyp].tokens;
      h.tokens.push_back(c.token);
      h.logp = c.logp;
      h.state = expansions[c.hyp].second;
      h.last = c.token;
      next.push_back(std::move(h));
    }
    live = std::move(next);
  }

  // bounded-output contract: whatever is still alive ends with a forced EOS
  for (Hyp& h : live) {
    const auto [logp, state] = step(h.state, h.last);
    (void)state;
    pool.push_back(BeamHypothesis{std::move(h.tokens), h.logp + logp.at(eos)});
  }

  if (pool.empty()) throw std::logic_error("beam_search: empty hypothesis pool");
  auto score = [length_norm](const BeamHypothesis& h) {
    return length_norm ? h.logp / static_cast<double>(h.tokens.size() + 1) : h.logp;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (score(pool[i]) > score(pool[best])) best = i;
  }
  return pool[best];
}

}  // namespace e2t
