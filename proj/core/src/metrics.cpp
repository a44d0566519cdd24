#include "e2t/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace e2t {

RougeScore make_rouge(double precision, double recall) {
  RougeScore s;
  s.precision = precision;
  s.recall = recall;
  s.f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return s;
}

namespace {

std::map<std::vector<std::string>, std::size_t> ngram_counts(
    const std::vector<std::string>& tokens, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

}  // namespace

RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, std::size_t n) {
  if (n == 0) throw std::invalid_argument("rouge_n: n must be positive");
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  std::size_t cand_total = 0, ref_total = 0, overlap = 0;
  for (const auto& [g, c] : cand) cand_total += c;
  for (const auto& [g, c] : ref) ref_total += c;
  for (const auto& [g, c] : cand) {
    auto it = ref.find(g);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  const double p = cand_total ? static_cast<double>(overlap) / cand_total : 0.0;
  const double r = ref_total ? static_cast<double>(overlap) / ref_total : 0.0;
  return make_rouge(p, r);
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return RougeScore{};
  const double l = static_cast<double>(lcs_length(candidate, reference));
  return make_rouge(l / candidate.size(), l / reference.size());
}

RougeReport evaluate_corpus(
    const std::vector<AnnotatedDocument>& docs,
    const std::function<std::vector<std::string>(const AnnotatedDocument&)>& summarize) {
  if (docs.empty()) throw std::invalid_argument("evaluate_corpus: empty test set");
  RougeReport report;
  for (const AnnotatedDocument& doc : docs) {
    const std::vector<std::string> candidate = summarize(doc);
    report.rouge1 += rouge_n(candidate, doc.target_tokens, 1).f1;
    report.rouge2 += rouge_n(candidate, doc.target_tokens, 2).f1;
    report.rougeL += rouge_l(candidate, doc.target_tokens).f1;
  }
  const double n = static_cast<double>(docs.size());
  report.rouge1 /= n;
  report.rouge2 /= n;
  report.rougeL /= n;
  return report;
}

std::string RougeReport::to_string() const {
  std::ostringstream os;
  os << "RG-1\tRG-2\tRG-L\n";
  os << std::fixed << std::setprecision(2) << rouge1 * 100.0 << '\t' << rouge2 * 100.0
     << '\t' << rougeL * 100.0 << '\n';
  return os.str();
}

}  // namespace e2t
