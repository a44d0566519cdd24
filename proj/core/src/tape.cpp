#include "e2t/tape.hpp"

#include <cmath>
#include <stdexcept>

#include "e2t/kernels.hpp"

namespace e2t {

void Tape::check(Var v, const char* op) const {
  if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw std::logic_error(std::string(op) + ": invalid graph variable");
  }
}

Tape::Var Tape::make(Tensor value, bool needs_grad, std::function<void(Tape&)> back) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Tape::Var Tape::constant(Tensor value) { return make(std::move(value), false, nullptr); }

Tape::Var Tape::input(Tensor value) { return make(std::move(value), true, nullptr); }

Tape::Var Tape::param(const std::string& name, const ParamMap& params) {
  auto cached = bound_params_.find(name);
  if (cached != bound_params_.end()) return cached->second;
  auto it = params.find(name);
  if (it == params.end()) {
    throw std::invalid_argument("unknown parameter: " + name);
  }
  Node n;
  n.external = &it->second;
  n.needs_grad = true;
  n.param_idx = static_cast<std::int32_t>(param_names_.size());
  param_names_.push_back(name);
  nodes_.push_back(std::move(n));
  Var v{static_cast<std::int32_t>(nodes_.size() - 1)};
  bound_params_.emplace(name, v);
  return v;
}

Tensor& Tape::grad_ref(std::int32_t id) {
  Node& n = nodes_[id];
  if (!n.grad_alloc) {
    n.grad = Tensor::zeros(val(id).shape());
    n.grad_alloc = true;
  }
  return n.grad;
}

const Tensor& Tape::value(Var v) const {
  check(v, "value");
  return val(v.id);
}

const Tensor& Tape::grad(Var v) const {
  check(v, "grad");
  const Node& n = nodes_[v.id];
  if (!n.grad_alloc) {
    static const Tensor kEmpty = Tensor::scalar(0.0);
    if (val(v.id).size() == 1 && val(v.id).rank() == 0) return kEmpty;
    throw std::logic_error("grad: no gradient was propagated to this node");
  }
  return n.grad;
}

bool Tape::has_grad(Var v) const {
  check(v, "has_grad");
  return nodes_[v.id].grad_alloc;
}

// ---------------------------------------------------------------------------
// elementwise

Tape::Var Tape::add(Var a, Var b) {
  check(a, "add");
  check(b, "add");
  Tensor out = k_add(val(a.id), val(b.id));
  bool ng = wants(a) || wants(b);
  int ia = a.id, ib = b.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [ia, ib](Tape& t) {
    const std::int32_t self = t.cursor_;
    const Tensor& g = t.out_grad(self);
    if (t.nodes_[ia].needs_grad) {
      double* da = t.grad_ref(ia).mut();
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g.data()[i];
    }
    if (t.nodes_[ib].needs_grad) {
      double* db = t.grad_ref(ib).mut();
      for (std::size_t i = 0; i < g.size(); ++i) db[i] += g.data()[i];
    }
  });
}

Tape::Var Tape::mul(Var a, Var b) {
  check(a, "mul");
  check(b, "mul");
  Tensor out = k_mul(val(a.id), val(b.id));
  bool ng = wants(a) || wants(b);
  int ia = a.id, ib = b.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [ia, ib](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    const Tensor& va = t.val(ia);
    const Tensor& vb = t.val(ib);
    if (t.nodes_[ia].needs_grad) {
      double* da = t.grad_ref(ia).mut();
      for (std::size_t i = 0; i < g.size(); ++i) da[i] += g.data()[i] * vb.data()[i];
    }
    if (t.nodes_[ib].needs_grad) {
      double* db = t.grad_ref(ib).mut();
      for (std::size_t i = 0; i < g.size(); ++i) db[i] += g.data()[i] * va.data()[i];
    }
  });
}

Tape::Var Tape::one_minus(Var a) {
  check(a, "one_minus");
  Tensor out = k_one_minus(val(a.id));
  bool ng = wants(a);
  int ia = a.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [ia](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    double* da = t.grad_ref(ia).mut();
    for (std::size_t i = 0; i < g.size(); ++i) da[i] -= g.data()[i];
  });
}

Tape::Var Tape::scale(Var a, double c) {
  check(a, "scale");
  Tensor out = k_scale(val(a.id), c);
  bool ng = wants(a);
  int ia = a.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [ia, c](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    double* da = t.grad_ref(ia).mut();
    for (std::size_t i = 0; i < g.size(); ++i) da[i] += c * g.data()[i];
  });
}

Tape::Var Tape::scale_by(Var v, Var s) {
  check(v, "scale_by");
  check(s, "scale_by");
  if (val(s.id).size() != 1) {
    throw std::invalid_argument("scale_by: scale must be a scalar node");
  }
  const double sv = val(s.id).data()[0];
  Tensor out = k_scale(val(v.id), sv);
  bool ng = wants(v) || wants(s);
  int iv = v.id, is = s.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [iv, is](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    const double sv2 = t.val(is).data()[0];
    const Tensor& vv = t.val(iv);
    if (t.nodes_[iv].needs_grad) {
      double* dv = t.grad_ref(iv).mut();
      for (std::size_t i = 0; i < g.size(); ++i) dv[i] += sv2 * g.data()[i];
    }
    if (t.nodes_[is].needs_grad) {
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g.data()[i] * vv.data()[i];
      t.grad_ref(is).mut()[0] += acc;
    }
  });
}

Tape::Var Tape::sigmoid(Var a) {
  check(a, "sigmoid");
  Tensor out = k_sigmoid(val(a.id));
  bool ng = wants(a);
  int ia = a.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [ia](Tape& t) {
    const std::int32_t self = t.cursor_;
    const Tensor& g = t.out_grad(self);
    const Tensor& y = t.val(self);
    double* da = t.grad_ref(ia).mut();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double yi = y.data()[i];
      da[i] += g.data()[i] * yi * (1.0 - yi);
    }
  });
}

Tape::Var Tape::tanh(Var a) {
  check(a, "tanh");
  Tensor out = k_tanh(val(a.id));
  bool ng = wants(a);
  int ia = a.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [ia](Tape& t) {
    const std::int32_t self = t.cursor_;
    const Tensor& g = t.out_grad(self);
    const Tensor& y = t.val(self);
    double* da = t.grad_ref(ia).mut();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double yi = y.data()[i];
      da[i] += g.data()[i] * (1.0 - yi * yi);
    }
  });
}

// ---------------------------------------------------------------------------
// vector ops

Tape::Var Tape::softmax(Var v) {
  check(v, "softmax");
  Tensor out = k_softmax(val(v.id));
  bool ng = wants(v);
  int iv = v.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [iv](Tape& t) {
    const std::int32_t self = t.cursor_;
    const Tensor& g = t.out_grad(self);
    const Tensor& y = t.val(self);
    double inner = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) inner += g.data()[i] * y.data()[i];
    double* dv = t.grad_ref(iv).mut();
    for (std::size_t i = 0; i < g.size(); ++i) {
      dv[i] += y.data()[i] * (g.data()[i] - inner);
    }
  });
}

Tape::Var Tape::log_softmax(Var v) {
  check(v, "log_softmax");
  Tensor out = k_log_softmax(val(v.id));
  bool ng = wants(v);
  int iv = v.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [iv](Tape& t) {
    const std::int32_t self = t.cursor_;
    const Tensor& g = t.out_grad(self);
    const Tensor& y = t.val(self);
    double gsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gsum += g.data()[i];
    double* dv = t.grad_ref(iv).mut();
    for (std::size_t i = 0; i < g.size(); ++i) {
      dv[i] += g.data()[i] - std::exp(y.data()[i]) * gsum;
    }
  });
}

Tape::Var Tape::pick(Var v, std::size_t i) {
  check(v, "pick");
  Tensor out = k_pick(val(v.id), i);
  bool ng = wants(v);
  int iv = v.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [iv, i](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    t.grad_ref(iv).mut()[i] += g.data()[0];
  });
}

Tape::Var Tape::dot(Var u, Var v) {
  check(u, "dot");
  check(v, "dot");
  Tensor out = k_dot(val(u.id), val(v.id));
  bool ng = wants(u) || wants(v);
  int iu = u.id, iv = v.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [iu, iv](Tape& t) {
    const double g = t.out_grad(t.cursor_).data()[0];
    const Tensor& vu = t.val(iu);
    const Tensor& vv = t.val(iv);
    if (t.nodes_[iu].needs_grad) {
      double* du = t.grad_ref(iu).mut();
      for (std::size_t i = 0; i < vu.size(); ++i) du[i] += g * vv.data()[i];
    }
    if (t.nodes_[iv].needs_grad) {
      double* dv = t.grad_ref(iv).mut();
      for (std::size_t i = 0; i < vv.size(); ++i) dv[i] += g * vu.data()[i];
    }
  });
}

Tape::Var Tape::sum(Var v) {
  check(v, "sum");
  Tensor out = k_sum(val(v.id));
  bool ng = wants(v);
  int iv = v.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [iv](Tape& t) {
    const double g = t.out_grad(t.cursor_).data()[0];
    double* dv = t.grad_ref(iv).mut();
    for (std::size_t i = 0; i < t.val(iv).size(); ++i) dv[i] += g;
  });
}

Tape::Var Tape::mean(Var v) {
  check(v, "mean");
  Tensor out = k_mean(val(v.id));
  bool ng = wants(v);
  int iv = v.id;
  const double inv = 1.0 / static_cast<double>(val(v.id).size());
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [iv, inv](Tape& t) {
    const double g = t.out_grad(t.cursor_).data()[0] * inv;
    double* dv = t.grad_ref(iv).mut();
    for (std::size_t i = 0; i < t.val(iv).size(); ++i) dv[i] += g;
  });
}

// ---------------------------------------------------------------------------
// linear algebra

Tape::Var Tape::matvec(Var m, Var x) {
  check(m, "matvec");
  check(x, "matvec");
  Tensor out = k_matvec(val(m.id), val(x.id));
  bool ng = wants(m) || wants(x);
  int im = m.id, ix = x.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [im, ix](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    const Tensor& vm = t.val(im);
    const Tensor& vx = t.val(ix);
    const std::size_t r = vm.rows(), c = vm.cols();
    if (t.nodes_[im].needs_grad) {
      double* dm = t.grad_ref(im).mut();
      for (std::size_t i = 0; i < r; ++i) {
        const double gi = g.data()[i];
        for (std::size_t j = 0; j < c; ++j) dm[i * c + j] += gi * vx.data()[j];
      }
    }
    if (t.nodes_[ix].needs_grad) {
      double* dx = t.grad_ref(ix).mut();
      for (std::size_t i = 0; i < r; ++i) {
        const double gi = g.data()[i];
        const double* rowp = vm.data() + i * c;
        for (std::size_t j = 0; j < c; ++j) dx[j] += gi * rowp[j];
      }
    }
  });
}

Tape::Var Tape::matvec_t(Var m, Var a) {
  check(m, "matvec_t");
  check(a, "matvec_t");
  Tensor out = k_matvec_t(val(m.id), val(a.id));
  bool ng = wants(m) || wants(a);
  int im = m.id, ia = a.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [im, ia](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    const Tensor& vm = t.val(im);
    const Tensor& va = t.val(ia);
    const std::size_t r = vm.rows(), c = vm.cols();
    if (t.nodes_[im].needs_grad) {
      double* dm = t.grad_ref(im).mut();
      for (std::size_t i = 0; i < r; ++i) {
        const double ai = va.data()[i];
        for (std::size_t j = 0; j < c; ++j) dm[i * c + j] += ai * g.data()[j];
      }
    }
    if (t.nodes_[ia].needs_grad) {
      double* da = t.grad_ref(ia).mut();
      for (std::size_t i = 0; i < r; ++i) {
        const double* rowp = vm.data() + i * c;
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) acc += rowp[j] * g.data()[j];
        da[i] += acc;
      }
    }
  });
}

Tape::Var Tape::matmul_nt(Var a, Var b) {
  check(a, "matmul_nt");
  check(b, "matmul_nt");
  Tensor out = k_matmul_nt(val(a.id), val(b.id));
  bool ng = wants(a) || wants(b);
  int ia = a.id, ib = b.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [ia, ib](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);  // n x m
    const Tensor& va = t.val(ia);             // n x k
    const Tensor& vb = t.val(ib);             // m x k
    const std::size_t n = va.rows(), k = va.cols(), m = vb.rows();
    if (t.nodes_[ia].needs_grad) {
      double* da = t.grad_ref(ia).mut();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          const double gij = g.data()[i * m + j];
          const double* rb = vb.data() + j * k;
          for (std::size_t x = 0; x < k; ++x) da[i * k + x] += gij * rb[x];
        }
      }
    }
    if (t.nodes_[ib].needs_grad) {
      double* db = t.grad_ref(ib).mut();
      for (std::size_t i = 0; i < n; ++i) {
        const double* ra = va.data() + i * k;
        for (std::size_t j = 0; j < m; ++j) {
          const double gij = g.data()[i * m + j];
          for (std::size_t x = 0; x < k; ++x) db[j * k + x] += gij * ra[x];
        }
      }
    }
  });
}

Tape::Var Tape::add_row_broadcast(Var m, Var v) {
  check(m, "add_row_broadcast");
  check(v, "add_row_broadcast");
  Tensor out = k_add_row_broadcast(val(m.id), val(v.id));
  bool ng = wants(m) || wants(v);
  int im = m.id, iv = v.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [im, iv](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    const std::size_t r = g.rows(), c = g.cols();
    if (t.nodes_[im].needs_grad) {
      double* dm = t.grad_ref(im).mut();
      for (std::size_t i = 0; i < g.size(); ++i) dm[i] += g.data()[i];
    }
    if (t.nodes_[iv].needs_grad) {
      double* dv = t.grad_ref(iv).mut();
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) dv[j] += g.data()[i * c + j];
      }
    }
  });
}

// ---------------------------------------------------------------------------
// structure

Tape::Var Tape::concat(const std::vector<Var>& parts) {
  std::vector<const Tensor*> vs;
  std::vector<int> ids;
  bool ng = false;
  for (Var p : parts) {
    check(p, "concat");
    vs.push_back(&val(p.id));
    ids.push_back(p.id);
    ng = ng || wants(p);
  }
  Tensor out = k_concat(vs);
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [ids](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    std::size_t off = 0;
    for (int id : ids) {
      const std::size_t n = t.val(id).size();
      if (t.nodes_[id].needs_grad) {
        double* d = t.grad_ref(id).mut();
        for (std::size_t i = 0; i < n; ++i) d[i] += g.data()[off + i];
      }
      off += n;
    }
  });
}

Tape::Var Tape::stack_rows(const std::vector<Var>& rows) {
  std::vector<const Tensor*> vs;
  std::vector<int> ids;
  bool ng = false;
  for (Var r : rows) {
    check(r, "stack_rows");
    vs.push_back(&val(r.id));
    ids.push_back(r.id);
    ng = ng || wants(r);
  }
  Tensor out = k_stack_rows(vs);
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [ids](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    const std::size_t d = g.cols();
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (!t.nodes_[ids[r]].needs_grad) continue;
      double* dr = t.grad_ref(ids[r]).mut();
      for (std::size_t j = 0; j < d; ++j) dr[j] += g.data()[r * d + j];
    }
  });
}

Tape::Var Tape::row(Var m, std::size_t r) {
  check(m, "row");
  Tensor out = k_row(val(m.id), r);
  bool ng = wants(m);
  int im = m.id;
  return make(std::move(out), ng, !ng ? std::function<void(Tape&)>() : [im, r](Tape& t) {
    const Tensor& g = t.out_grad(t.cursor_);
    const std::size_t c = t.val(im).cols();
    double* dm = t.grad_ref(im).mut();
    for (std::size_t j = 0; j < c; ++j) dm[r * c + j] += g.data()[j];
  });
}

Tape::Var Tape::dropout(Var x, double rate, Rng& rng) {
  check(x, "dropout");
  if (rate < 0.0 || rate >= 1.0) {
    throw std::invalid_argument("dropout rate must be in [0,1)");
  }
  if (rate == 0.0) return x;
  const Tensor& vx = val(x.id);
  Tensor mask(vx.shape());
  double* pm = mask.mut();
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    pm[i] = rng.bernoulli(rate) ? 0.0 : keep_scale;
  }
  Tensor out = k_mul(vx, mask);
  bool ng = wants(x);
  int ix = x.id;
  return make(std::move(out), ng,
              !ng ? std::function<void(Tape&)>() : [ix, mask](Tape& t) {
                const Tensor& g = t.out_grad(t.cursor_);
                double* dx = t.grad_ref(ix).mut();
                for (std::size_t i = 0; i < g.size(); ++i) {
                  dx[i] += g.data()[i] * mask.data()[i];
                }
              });
}

// ---------------------------------------------------------------------------

GradMap Tape::backward(Var loss) {
  check(loss, "backward");
  if (backward_done_) throw std::logic_error("backward already run on this tape");
  backward_done_ = true;
  if (val(loss.id).size() != 1) {
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                shape_str(val(loss.id).shape()));
  }
  grad_ref(loss.id).mut()[0] = 1.0;
  for (std::int32_t id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.grad_alloc || !n.back) continue;
    cursor_ = id;
    n.back(*this);
  }
  GradMap grads;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.param_idx < 0) continue;
    if (n.grad_alloc) {
      grads[param_names_[n.param_idx]] = n.grad;
    } else {
      grads[param_names_[n.param_idx]] = Tensor::zeros(val(id).shape());
    }
  }
  return grads;
}

}  // namespace e2t
