#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "e2t/rng.hpp"
#include "e2t/tensor.hpp"

namespace e2t {

// Named parameter collection. Ordered so that iteration (checkpointing,
// optimizer sweeps) is deterministic.
using ParamMap = std::map<std::string, Tensor>;
using GradMap = std::map<std::string, Tensor>;

// Reverse-mode differentiation graph. Values are computed eagerly as nodes
// are created; backward() walks the nodes in reverse creation order, which is
// a valid topological order because operations only consume existing nodes.
//
// Parameter leaves reference tensors owned by a ParamMap that must outlive
// the tape. A tape is single-use: build a forward pass, call backward once.
class Tape {
 public:
  struct Var {
    std::int32_t id = -1;
    bool valid() const { return id >= 0; }
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // leaves
  Var constant(Tensor value);                  // no gradient flows into it
  Var input(Tensor value);                     // differentiated leaf
  Var param(const std::string& name, const ParamMap& params);

  // elementwise
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var one_minus(Var a);
  Var scale(Var a, double c);
  Var scale_by(Var v, Var s);  // vector times scalar node
  Var sigmoid(Var a);
  Var tanh(Var a);

  // vector reductions / maps
  Var softmax(Var v);
  Var log_softmax(Var v);
  Var pick(Var v, std::size_t i);
  Var dot(Var u, Var v);
  Var sum(Var v);
  Var mean(Var v);

  // linear algebra
  Var matvec(Var m, Var x);     // M x
  Var matvec_t(Var m, Var a);   // M^T a
  Var matmul_nt(Var a, Var b);  // A B^T
  Var add_row_broadcast(Var m, Var v);

  // structure
  Var concat(const std::vector<Var>& parts);
  Var stack_rows(const std::vector<Var>& rows);
  Var row(Var m, std::size_t r);

  // inverted dropout (training mode); rate 0 returns the input unchanged
  Var dropout(Var x, double rate, Rng& rng);

  const Tensor& value(Var v) const;
  const Tensor& grad(Var v) const;  // valid after backward
  bool has_grad(Var v) const;

  // Computes d(loss)/d(parameter) for every bound parameter. Gradients
  // accumulate additively across uses of a node. loss must be scalar.
  GradMap backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool grad_alloc = false;
    bool needs_grad = false;
    std::int32_t param_idx = -1;
    std::function<void(Tape&)> back;
  };

  const Tensor& val(std::int32_t id) const {
    const Node& n = nodes_[id];
    return n.external ? *n.external : n.value;
  }
  Tensor& grad_ref(std::int32_t id);
  const Tensor& out_grad(std::int32_t id) const { return nodes_[id].grad; }
  bool wants(Var v) const { return nodes_[v.id].needs_grad; }

  Var make(Tensor value, bool needs_grad, std::function<void(Tape&)> back);
  void check(Var v, const char* op) const;

  std::vector<Node> nodes_;
  std::vector<std::string> param_names_;
  std::unordered_map<std::string, Var> bound_params_;
  std::int32_t cursor_ = -1;  // node whose backward rule is running
  bool backward_done_ = false;
};

}  // namespace e2t
