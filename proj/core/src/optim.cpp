#include "e2t/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace e2t {

void adadelta_step(ParamMap& params, const GradMap& grads, AdadeltaState& state) {
  const double rho = state.rho;
  const double eps = state.epsilon;
  for (auto& [name, x] : params) {
    auto git = grads.find(name);
    const Tensor* g = git == grads.end() ? nullptr : &git->second;
    if (g && !g->same_shape(x)) {
      throw std::invalid_argument("adadelta_step: gradient shape mismatch for " + name);
    }
    auto sg = state.sq_grad.find(name);
    if (sg == state.sq_grad.end()) {
      sg = state.sq_grad.emplace(name, Tensor::zeros(x.shape())).first;
      state.sq_delta.emplace(name, Tensor::zeros(x.shape()));
    }
    Tensor& eg2 = sg->second;
    Tensor& ed2 = state.sq_delta.at(name);
    double* peg = eg2.mut();
    double* ped = ed2.mut();
    double* px = x.mut();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double gi = g ? g->data()[i] : 0.0;
      peg[i] = rho * peg[i] + (1.0 - rho) * gi * gi;
      const double dx = -(std::sqrt(ped[i] + eps) / std::sqrt(peg[i] + eps)) * gi;
      ped[i] = rho * ped[i] + (1.0 - rho) * dx * dx;
      px[i] += dx;
    }
  }
}

Tensor maxnorm_constraint(const Tensor& param, double limit) {
  if (limit <= 0.0) throw std::invalid_argument("maxnorm_constraint: limit must be positive");
  const std::size_t rows = param.rank() == 2 ? param.rows() : 1;
  const std::size_t cols = param.rank() == 2 ? param.cols() : param.size();
  Tensor out = param;
  double* p = nullptr;
  for (std::size_t r = 0; r < rows; ++r) {
    double sq = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = param.data()[r * cols + j];
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (norm > limit) {
      if (!p) p = out.mut();
      const double s = limit / norm;
      for (std::size_t j = 0; j < cols; ++j) p[r * cols + j] *= s;
    }
  }
  return out;
}

void apply_maxnorm(ParamMap& params, double limit) {
  for (auto& [name, t] : params) t = maxnorm_constraint(t, limit);
}

void accumulate_grads(GradMap& into, const GradMap& from) {
  for (const auto& [name, g] : from) {
    auto it = into.find(name);
    if (it == into.end()) {
      into.emplace(name, g);
      continue;
    }
    if (!it->second.same_shape(g)) {
      throw std::invalid_argument("accumulate_grads: shape mismatch for " + name);
    }
    double* p = it->second.mut();
    for (std::size_t i = 0; i < g.size(); ++i) p[i] += g.data()[i];
  }
}

void scale_grads(GradMap& grads, double c) {
  for (auto& [name, g] : grads) {
    double* p = g.mut();
    for (std::size_t i = 0; i < g.size(); ++i) p[i] *= c;
  }
}

Tensor dropout(const Tensor& t, double rate, DropoutMode mode, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw std::invalid_argument("dropout rate must be in [0,1)");
  }
  if (mode == DropoutMode::eval || rate == 0.0) return t;
  Tensor out(t.shape());
  double* o = out.mut();
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < t.size(); ++i) {
    o[i] = rng.bernoulli(rate) ? 0.0 : t.data()[i] * keep_scale;
  }
  return out;
}

}  // namespace e2t
