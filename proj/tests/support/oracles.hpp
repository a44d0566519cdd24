#pragma once

// Test-side reference implementations, kept independent of the library code
// they check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "e2t/kernels.hpp"
#include "e2t/rng.hpp"
#include "e2t/tensor.hpp"

namespace oracle {

// -- softmax at extended precision ------------------------------------------

inline std::vector<double> softmax_longdouble(const std::vector<double>& v) {
  long double mx = v[0];
  for (double x : v) mx = std::max<long double>(mx, x);
  long double sum = 0.0L;
  std::vector<long double> e(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    e[i] = std::exp(static_cast<long double>(v[i]) - mx);
    sum += e[i];
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(e[i] / sum);
  return out;
}

// -- scalar GRU recurrences ---------------------------------------------------

struct ScalarGru {
  double Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;

  double step(double x, double h) const {
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    const double z = sig(Wz * x + Uz * h + bz);
    const double r = sig(Wr * x + Ur * h + br);
    const double cand = std::tanh(Wh * x + Uh * (r * h) + bh);
    return (1.0 - z) * h + z * cand;
  }
};

// -- Adadelta recurrences -----------------------------------------------------

struct ScalarAdadelta {
  double rho = 0.95, eps = 1e-6;
  double eg2 = 0.0, ed2 = 0.0;

  double step(double g) {
    eg2 = rho * eg2 + (1.0 - rho) * g * g;
    const double dx = -(std::sqrt(ed2 + eps) / std::sqrt(eg2 + eps)) * g;
    ed2 = rho * ed2 + (1.0 - rho) * dx * dx;
    return dx;
  }
};

// -- ROUGE references ---------------------------------------------------------

// O(n*m) scan that marks used reference n-grams instead of counting maps.
inline std::size_t clipped_ngram_overlap(const std::vector<std::string>& cand,
                                         const std::vector<std::string>& ref,
                                         std::size_t n) {
  if (cand.size() < n || ref.size() < n) return 0;
  std::vector<bool> used(ref.size() + 1 - n, false);
  std::size_t overlap = 0;
  for (std::size_t i = 0; i + n <= cand.size(); ++i) {
    for (std::size_t j = 0; j + n <= ref.size(); ++j) {
      if (used[j]) continue;
      bool equal = true;
      for (std::size_t t = 0; t < n; ++t) {
        if (cand[i + t] != ref[j + t]) {
          equal = false;
          break;
        }
      }
      if (equal) {
        used[j] = true;
        ++overlap;
        break;
      }
    }
  }
  return overlap;
}

// Memoized recursive LCS.
inline std::size_t lcs_memo(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> rec =
      [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::size_t best;
    if (a[i] == b[j]) {
      best = 1 + rec(i + 1, j + 1);
    } else {
      best = std::max(rec(i + 1, j), rec(i, j + 1));
    }
    memo.emplace(key, best);
    return best;
  };
  return rec(0, 0);
}

// -- table-driven sequence scorer for beam search -----------------------------

// Deterministic log-probability table keyed by the token prefix. BOS is a
// sentinel equal to vocab_size; EOS is token 0.
struct MockScorer {
  std::size_t vocab_size;
  std::uint64_t seed;
  static constexpr int kEos = 0;

  int bos() const { return static_cast<int>(vocab_size); }

  std::vector<double> logprobs(const std::vector<int>& prefix) const {
    std::uint64_t h = seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull;
    for (int tok : prefix) {
      h = h * 6364136223846793005ull + static_cast<std::uint64_t>(tok) * 2862933555777941757ull + 1442695040888963407ull;
    }
    e2t::Rng rng(h);
    std::vector<double> logits(vocab_size);
    for (double& v : logits) v = rng.uniform(-3.0, 3.0);
    e2t::Tensor t = e2t::k_log_softmax(e2t::Tensor::vector(logits));
    return std::vector<double>(t.data(), t.data() + t.size());
  }

  // beam_search-compatible step: state is the consumed prefix
  std::pair<e2t::Tensor, std::vector<int>> step(const std::vector<int>& state,
                                                int y_prev) const {
    std::vector<int> folded = state;
    if (y_prev != bos()) folded.push_back(y_prev);
    std::vector<double> lp = logprobs(folded);
    return {e2t::Tensor::vector(lp), folded};
  }
};

struct ScoredSequence {
  std::vector<int> tokens;
  double logp = -std::numeric_limits<double>::infinity();
};

// Exhaustive enumeration of every content-token sequence up to max_len, each
// terminated by EOS (forced at max_len). Strict > keeps the first maximum.
inline ScoredSequence exhaustive_best(const MockScorer& scorer, std::size_t max_len) {
  ScoredSequence best;
  std::vector<int> prefix;
  std::function<void(double)> rec = [&](double logp_so_far) {
    const std::vector<double> lp = scorer.logprobs(prefix);
    const double completed = logp_so_far + lp[MockScorer::kEos];
    if (completed > best.logp) {
      best.logp = completed;
      best.tokens = prefix;
    }
    if (prefix.size() == max_len) return;
    for (std::size_t tok = 1; tok < scorer.vocab_size; ++tok) {
      prefix.push_back(static_cast<int>(tok));
      rec(logp_so_far + lp[tok]);
      prefix.pop_back();
    }
  };
  rec(0.0);
  return best;
}

// Greedy argmax decoding against the same scorer (ties to the lower token id).
inline ScoredSequence greedy_decode(const MockScorer& scorer, std::size_t max_len) {
  ScoredSequence out;
  out.logp = 0.0;
  std::vector<int> prefix;
  for (std::size_t t = 0; t < max_len; ++t) {
    const std::vector<double> lp = scorer.logprobs(prefix);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < lp.size(); ++i) {
      if (lp[i] > lp[arg]) arg = i;
    }
    out.logp += lp[arg];
    if (arg == MockScorer::kEos) {
      out.tokens = prefix;
      return out;
    }
    prefix.push_back(static_cast<int>(arg));
  }
  out.logp += scorer.logprobs(prefix)[MockScorer::kEos];
  out.tokens = prefix;
  return out;
}

}  // namespace oracle
