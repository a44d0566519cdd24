#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "e2t/kernels.hpp"
#include "e2t/rng.hpp"
#include "e2t/tape.hpp"

namespace e2t {

// The model forward pass is written once, templated over an algebra that
// supplies values and operations. TrainAlgebra builds a differentiation
// graph with live dropout; EvalAlgebra computes plain tensors with dropout
// as the identity, so decoding never pays for graph bookkeeping.

struct TrainAlgebra {
  Tape& tape;
  const ParamMap& params;
  Rng* dropout_rng = nullptr;
  double dropout_rate = 0.0;

  using V = Tape::Var;

  V param(const std::string& name) { return tape.param(name, params); }
  V constant(Tensor t) { return tape.constant(std::move(t)); }
  V add(V a, V b) { return tape.add(a, b); }
  V mul(V a, V b) { return tape.mul(a, b); }
  V one_minus(V a) { return tape.one_minus(a); }
  V scale(V a, double c) { return tape.scale(a, c); }
  V scale_by(V v, V s) { return tape.scale_by(v, s); }
  V sigmoid(V a) { return tape.sigmoid(a); }
  V tanh(V a) { return tape.tanh(a); }
  V softmax(V v) { return tape.softmax(v); }
  V log_softmax(V v) { return tape.log_softmax(v); }
  V pick(V v, std::size_t i) { return tape.pick(v, i); }
  V dot(V u, V v) { return tape.dot(u, v); }
  V matvec(V m, V x) { return tape.matvec(m, x); }
  V matvec_t(V m, V a) { return tape.matvec_t(m, a); }
  V matmul_nt(V a, V b) { return tape.matmul_nt(a, b); }
  V add_row_broadcast(V m, V v) { return tape.add_row_broadcast(m, v); }
  V concat(const std::vector<V>& parts) { return tape.concat(parts); }
  V stack_rows(const std::vector<V>& rows) { return tape.stack_rows(rows); }
  V row(V m, std::size_t r) { return tape.row(m, r); }
  V dropout(V x) {
    if (!dropout_rng || dropout_rate <= 0.0) return x;
    return tape.dropout(x, dropout_rate, *dropout_rng);
  }
  const Tensor& value(V v) const { return tape.value(v); }
};

struct EvalAlgebra {
  const ParamMap& params;

  using V = Tensor;

  const Tensor& param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw std::invalid_argument("unknown parameter: " + name);
    return it->second;
  }
  static Tensor constant(Tensor t) { return t; }
  static Tensor add(const Tensor& a, const Tensor& b) { return k_add(a, b); }
  static Tensor mul(const Tensor& a, const Tensor& b) { return k_mul(a, b); }
  static Tensor one_minus(const Tensor& a) { return k_one_minus(a); }
  static Tensor scale(const Tensor& a, double c) { return k_scale(a, c); }
  static Tensor scale_by(const Tensor& v, const Tensor& s) {
    return k_scale(v, s.scalar_value());
  }
  static Tensor sigmoid(const Tensor& a) { return k_sigmoid(a); }
  static Tensor tanh(const Tensor& a) { return k_tanh(a); }
  static Tensor softmax(const Tensor& v) { return k_softmax(v); }
  static Tensor log_softmax(const Tensor& v) { return k_log_softmax(v); }
  static Tensor pick(const Tensor& v, std::size_t i) { return k_pick(v, i); }
  static Tensor dot(const Tensor& u, const Tensor& v) { return k_dot(u, v); }
  static Tensor matvec(const Tensor& m, const Tensor& x) { return k_matvec(m, x); }
  static Tensor matvec_t(const Tensor& m, const Tensor& a) { return k_matvec_t(m, a); }
  static Tensor matmul_nt(const Tensor& a, const Tensor& b) { return k_matmul_nt(a, b); }
  static Tensor add_row_broadcast(const Tensor& m, const Tensor& v) {
    return k_add_row_broadcast(m, v);
  }
  static Tensor concat(const std::vector<Tensor>& parts) {
    std::vector<const Tensor*> ps;
    ps.reserve(parts.size());
    for (const Tensor& p : parts) ps.push_back(&p);
    return k_concat(ps);
  }
  static Tensor stack_rows(const std::vector<Tensor>& rows) {
    std::vector<const Tensor*> ps;
    ps.reserve(rows.size());
    for (const Tensor& r : rows) ps.push_back(&r);
    return k_stack_rows(ps);
  }
  static Tensor row(const Tensor& m, std::size_t r) { return k_row(m, r); }
  static Tensor dropout(const Tensor& x) { return x; }
  static const Tensor& value(const Tensor& v) { return v; }
};

}  // namespace e2t
