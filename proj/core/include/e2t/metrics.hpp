#pragma once

#include <functional>
#include <string>
#include <vector>

#include "e2t/corpus.hpp"

namespace e2t {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore make_rouge(double precision, double recall);

// Clipped n-gram overlap. n beyond both sequences scores zero.
RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, std::size_t n);

// Longest-common-subsequence precision/recall over whole token sequences.
RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

struct RougeReport {
  double rouge1 = 0.0;  // corpus means in [0,1]
  double rouge2 = 0.0;
  double rougeL = 0.0;

  // "RG-1\tRG-2\tRG-L" header plus values x100 with two decimals
  std::string to_string() const;
};

// Decodes every document with `summarize` and averages full-length F1 scores
// against the references.
RougeReport evaluate_corpus(
    const std::vector<AnnotatedDocument>& docs,
    const std::function<std::vector<std::string>(const AnnotatedDocument&)>& summarize);

}  // namespace e2t
