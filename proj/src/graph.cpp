#include "affect/graph.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

#include "affect/errors.hpp"

namespace affect {

namespace {

NodePtr make_node(Tensor value, std::vector<NodePtr> parents) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->parents = std::move(parents);
  n->requires_grad = false;
  for (const auto& p : n->parents) {
    if (p->requires_grad) n->requires_grad = true;
  }
  if (n->requires_grad) n->grad = Tensor::zeros(n->value.shape);
  return n;
}

void accumulate(Node& target, const Tensor& g) {
  if (!target.requires_grad) return;
  add_inplace(target.grad, g);
}

}  // namespace

NodePtr make_param(Tensor value, std::string name) {
  auto n = std::make_shared<Node>();
  n->grad = Tensor::zeros(value.shape);
  n->value = std::move(value);
  n->requires_grad = true;
  n->name = std::move(name);
  return n;
}

NodePtr make_const(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = false;
  return n;
}

void zero_grad(const NodePtr& n) {
  n->grad = Tensor::zeros(n->value.shape);
}

void zero_grads(const std::vector<NodePtr>& params) {
  for (const auto& p : params) zero_grad(p);
}

void backward(const NodePtr& root) {
  if (!root) throw StateError("backward: null root");
  if (root->value.numel() != 1) {
    throw DimensionError("backward: root must be scalar, got " +
                         shape_str(root->value));
  }
  if (!root->requires_grad) return;  // nothing reachable is trainable

  // Reverse topological order via iterative post-order DFS: a node ends up
  // after all nodes that consume it, so the reversed list is safe to
  // backprop front to back.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->grad.data[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backprop) (*it)->backprop();
  }
}

void Tape::record(NodePtr root) {
  root_ = std::move(root);
  armed_ = true;
}

void Tape::backward() {
  if (!root_) throw StateError("backward called before any forward pass");
  if (!armed_) {
    throw StateError("backward called twice on one forward pass");
  }
  armed_ = false;
  affect::backward(root_);
}

NodePtr g_add(const NodePtr& a, const NodePtr& b) {
  auto n = make_node(add(a->value, b->value), {a, b});
  Node* self = n.get();
  Node *pa = a.get(), *pb = b.get();
  n->backprop = [self, pa, pb] {
    accumulate(*pa, self->grad);
    accumulate(*pb, self->grad);
  };
  return n;
}

NodePtr g_hadamard(const NodePtr& a, const NodePtr& b) {
  auto n = make_node(hadamard(a->value, b->value), {a, b});
  Node* self = n.get();
  Node *pa = a.get(), *pb = b.get();
  n->backprop = [self, pa, pb] {
    if (pa->requires_grad) add_inplace(pa->grad, hadamard(self->grad, pb->value));
    if (pb->requires_grad) add_inplace(pb->grad, hadamard(self->grad, pa->value));
  };
  return n;
}

NodePtr g_scale(const NodePtr& a, double s) {
  auto n = make_node(scale(a->value, s), {a});
  Node* self = n.get();
  Node* pa = a.get();
  n->backprop = [self, pa, s] {
    if (pa->requires_grad) axpy_inplace(pa->grad, s, self->grad);
  };
  return n;
}

NodePtr g_act(const NodePtr& x, Act f) {
  auto n = make_node(act_apply(x->value, f), {x});
  Node* self = n.get();
  Node* px = x.get();
  n->backprop = [self, px, f] {
    if (!px->requires_grad) return;
    for (std::size_t i = 0; i < px->grad.data.size(); ++i) {
      px->grad.data[i] +=
          self->grad.data[i] * act_grad_from_y(self->value.data[i], f);
    }
  };
  return n;
}

NodePtr g_matvec(const NodePtr& W, const NodePtr& x) {
  auto n = make_node(matvec(W->value, x->value), {W, x});
  Node* self = n.get();
  Node *pW = W.get(), *px = x.get();
  n->backprop = [self, pW, px] {
    if (pW->requires_grad) add_outer(pW->grad, self->grad, px->value);
    if (px->requires_grad)
      add_inplace(px->grad, matvec_transposed(pW->value, self->grad));
  };
  return n;
}

NodePtr g_affine(const NodePtr& W, const NodePtr& x, const NodePtr& b) {
  auto n = make_node(affine(W->value, x->value, b->value), {W, x, b});
  Node* self = n.get();
  Node *pW = W.get(), *px = x.get(), *pb = b.get();
  n->backprop = [self, pW, px, pb] {
    if (pW->requires_grad) add_outer(pW->grad, self->grad, px->value);
    if (px->requires_grad)
      add_inplace(px->grad, matvec_transposed(pW->value, self->grad));
    if (pb->requires_grad) add_inplace(pb->grad, self->grad);
  };
  return n;
}

NodePtr g_concat(const std::vector<NodePtr>& parts) {
  if (parts.empty()) throw EmptyInputError("concat: no inputs");
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p->value.rank() != 1) {
      throw DimensionError("concat: expected rank-1 parts, got " +
                           shape_str(p->value));
    }
    total += p->value.numel();
  }
  Tensor v = Tensor::zeros({total});
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy(p->value.data.begin(), p->value.data.end(),
              v.data.begin() + static_cast<std::ptrdiff_t>(off));
    off += p->value.numel();
  }
  auto n = make_node(std::move(v), parts);
  Node* self = n.get();
  n->backprop = [self] {
    std::size_t at = 0;
    for (const auto& p : self->parents) {
      const std::size_t len = p->value.numel();
      if (p->requires_grad) {
        for (std::size_t i = 0; i < len; ++i)
          p->grad.data[i] += self->grad.data[at + i];
      }
      at += len;
    }
  };
  return n;
}

NodePtr g_sum(const NodePtr& x) {
  double acc = 0.0;
  for (double v : x->value.data) acc += v;
  auto n = make_node(Tensor::vec({acc}), {x});
  Node* self = n.get();
  Node* px = x.get();
  n->backprop = [self, px] {
    if (!px->requires_grad) return;
    const double g = self->grad.data[0];
    for (double& d : px->grad.data) d += g;
  };
  return n;
}

NodePtr g_row(const NodePtr& X, std::size_t t) {
  const std::size_t rows = X->value.rows(), cols = X->value.cols();
  if (t >= rows) {
    throw IndexError("row: index " + std::to_string(t) + " out of range for " +
                     shape_str(X->value));
  }
  Tensor v = Tensor::zeros({cols});
  std::copy_n(X->value.data.begin() + static_cast<std::ptrdiff_t>(t * cols),
              cols, v.data.begin());
  auto n = make_node(std::move(v), {X});
  Node* self = n.get();
  Node* pX = X.get();
  n->backprop = [self, pX, t, cols] {
    if (!pX->requires_grad) return;
    for (std::size_t j = 0; j < cols; ++j)
      pX->grad.data[t * cols + j] += self->grad.data[j];
  };
  return n;
}

NodePtr g_gather_rows(const NodePtr& E, const std::vector<std::size_t>& idx) {
  const std::size_t V = E->value.rows(), d = E->value.cols();
  if (idx.empty()) throw EmptyInputError("gather_rows: empty index list");
  Tensor v = Tensor::zeros({idx.size(), d});
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (idx[t] >= V) {
      throw IndexError("gather_rows: row " + std::to_string(idx[t]) +
                       " out of range for " + shape_str(E->value));
    }
    std::copy_n(
        E->value.data.begin() + static_cast<std::ptrdiff_t>(idx[t] * d), d,
        v.data.begin() + static_cast<std::ptrdiff_t>(t * d));
  }
  auto n = make_node(std::move(v), {E});
  Node* self = n.get();
  Node* pE = E.get();
  auto indices = idx;
  n->backprop = [self, pE, indices, d] {
    if (!pE->requires_grad) return;
    for (std::size_t t = 0; t < indices.size(); ++t) {
      for (std::size_t j = 0; j < d; ++j)
        pE->grad.data[indices[t] * d + j] += self->grad.data[t * d + j];
    }
  };
  return n;
}

NodePtr g_stack_rows(const std::vector<NodePtr>& rows) {
  if (rows.empty()) throw EmptyInputError("stack_rows: no rows");
  for (const NodePtr& r : rows) {
    if (r->value.rank() != 1 ||
        !r->value.same_shape(rows.front()->value)) {
      throw DimensionError("stack_rows: rows must be equal-length vectors, "
                           "got " +
                           shape_str(rows.front()->value) + " and " +
                           shape_str(r->value));
    }
  }
  const std::size_t d = rows.front()->value.numel();
  Tensor v = Tensor::zeros({rows.size(), d});
  for (std::size_t t = 0; t < rows.size(); ++t) {
    std::copy_n(rows[t]->value.data.begin(), d,
                v.data.begin() + static_cast<std::ptrdiff_t>(t * d));
  }
  auto n = make_node(std::move(v), rows);
  Node* self = n.get();
  n->backprop = [self, d] {
    for (std::size_t t = 0; t < self->parents.size(); ++t) {
      Node* row = self->parents[t].get();
      if (!row->requires_grad) continue;
      for (std::size_t j = 0; j < d; ++j)
        row->grad.data[j] += self->grad.data[t * d + j];
    }
  };
  return n;
}

NodePtr g_rowwise_affine(const NodePtr& W, const NodePtr& b, const NodePtr& X,
                         Act f) {
  const std::size_t T = X->value.rows(), n_in = X->value.cols();
  const std::size_t m = W->value.rows();
  if (W->value.cols() != n_in || b->value.numel() != m) {
    throw DimensionError("rowwise_affine: shape " + shape_str(W->value) +
                         " does not conform with " + shape_str(X->value));
  }
  Tensor y = Tensor::zeros({T, m});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      double acc = b->value.data[i];
      const double* wrow = &W->value.data[i * n_in];
      const double* xrow = &X->value.data[t * n_in];
      for (std::size_t j = 0; j < n_in; ++j) acc += wrow[j] * xrow[j];
      y.data[t * m + i] = act_apply(acc, f);
    }
  }
  auto node = make_node(std::move(y), {W, b, X});
  Node* self = node.get();
  Node *pW = W.get(), *pb = b.get(), *pX = X.get();
  node->backprop = [self, pW, pb, pX, T, m, n_in, f] {
    for (std::size_t t = 0; t < T; ++t) {
      const double* xrow = &pX->value.data[t * n_in];
      for (std::size_t i = 0; i < m; ++i) {
        const double dpre =
            self->grad.data[t * m + i] *
            act_grad_from_y(self->value.data[t * m + i], f);
        if (dpre == 0.0) continue;
        if (pW->requires_grad) {
          double* wg = &pW->grad.data[i * n_in];
          for (std::size_t j = 0; j < n_in; ++j) wg[j] += dpre * xrow[j];
        }
        if (pb->requires_grad) pb->grad.data[i] += dpre;
        if (pX->requires_grad) {
          const double* wrow = &pW->value.data[i * n_in];
          double* xg = &pX->grad.data[t * n_in];
          for (std::size_t j = 0; j < n_in; ++j) xg[j] += dpre * wrow[j];
        }
      }
    }
  };
  return node;
}

namespace {

// Shared core for the centered and valid convolutions: `starts[p]` is the
// (possibly negative) index of the first input row of output position p.
NodePtr conv_core(const NodePtr& W, const NodePtr& b, const NodePtr& X,
                  std::size_t c, Act f, std::ptrdiff_t first_start,
                  std::size_t positions) {
  const std::size_t T = X->value.rows(), n_in = X->value.cols();
  const std::size_t m = W->value.rows();
  if (W->value.cols() != c * n_in || b->value.numel() != m) {
    throw DimensionError("conv: shape " + shape_str(W->value) +
                         " does not conform with window " + std::to_string(c) +
                         " over " + shape_str(X->value));
  }
  Tensor y = Tensor::zeros({positions, m});
  for (std::size_t p = 0; p < positions; ++p) {
    const std::ptrdiff_t start = first_start + static_cast<std::ptrdiff_t>(p);
    for (std::size_t i = 0; i < m; ++i) {
      double acc = b->value.data[i];
      const double* wrow = &W->value.data[i * c * n_in];
      for (std::size_t k = 0; k < c; ++k) {
        const std::ptrdiff_t row = start + static_cast<std::ptrdiff_t>(k);
        if (row < 0 || row >= static_cast<std::ptrdiff_t>(T)) continue;
        const double* xrow = &X->value.data[static_cast<std::size_t>(row) * n_in];
        const double* wseg = wrow + k * n_in;
        for (std::size_t j = 0; j < n_in; ++j) acc += wseg[j] * xrow[j];
      }
      y.data[p * m + i] = act_apply(acc, f);
    }
  }
  auto node = make_node(std::move(y), {W, b, X});
  Node* self = node.get();
  Node *pW = W.get(), *pb = b.get(), *pX = X.get();
  node->backprop = [self, pW, pb, pX, c, f, first_start, positions, T, m,
                    n_in] {
    for (std::size_t p = 0; p < positions; ++p) {
      const std::ptrdiff_t start = first_start + static_cast<std::ptrdiff_t>(p);
      for (std::size_t i = 0; i < m; ++i) {
        const double dpre =
            self->grad.data[p * m + i] *
            act_grad_from_y(self->value.data[p * m + i], f);
        if (dpre == 0.0) continue;
        if (pb->requires_grad) pb->grad.data[i] += dpre;
        for (std::size_t k = 0; k < c; ++k) {
          const std::ptrdiff_t row = start + static_cast<std::ptrdiff_t>(k);
          if (row < 0 || row >= static_cast<std::ptrdiff_t>(T)) continue;
          const std::size_t r = static_cast<std::size_t>(row);
          if (pW->requires_grad) {
            double* wg = &pW->grad.data[i * c * n_in + k * n_in];
            const double* xrow = &pX->value.data[r * n_in];
            for (std::size_t j = 0; j < n_in; ++j) wg[j] += dpre * xrow[j];
          }
          if (pX->requires_grad) {
            double* xg = &pX->grad.data[r * n_in];
            const double* wseg = &pW->value.data[i * c * n_in + k * n_in];
            for (std::size_t j = 0; j < n_in; ++j) xg[j] += dpre * wseg[j];
          }
        }
      }
    }
  };
  return node;
}

}  // namespace

NodePtr g_conv_centered(const NodePtr& W, const NodePtr& b, const NodePtr& X,
                        std::size_t c, Act f) {
  if (c < 1 || c % 2 == 0) {
    throw ConfigError("centered convolution window must be odd, got " +
                      std::to_string(c));
  }
  const std::size_t T = X->value.rows();
  if (T == 0) throw EmptyInputError("conv: empty input sequence");
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(c / 2);
  return conv_core(W, b, X, c, f, -half, T);
}

NodePtr g_conv_ngram(const NodePtr& W, const NodePtr& b, const NodePtr& X,
                     std::size_t h, Act f) {
  if (h < 1) throw ConfigError("n-gram filter height must be >= 1");
  const std::size_t T = X->value.rows();
  if (T == 0) throw EmptyInputError("conv: empty input sequence");
  if (T < h) {
    throw DimensionError("conv: sequence of " + std::to_string(T) +
                         " rows shorter than filter height " +
                         std::to_string(h));
  }
  return conv_core(W, b, X, h, f, 0, T - h + 1);
}

NodePtr g_maxpool_rows(const NodePtr& X) {
  const std::size_t T = X->value.rows(), d = X->value.cols();
  if (T == 0) throw EmptyInputError("maxpool: empty input sequence");
  Tensor v = Tensor::zeros({d});
  std::vector<std::size_t> argmax(d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    double best = X->value.data[j];
    std::size_t at = 0;
    for (std::size_t t = 1; t < T; ++t) {
      const double cand = X->value.data[t * d + j];
      if (cand > best) {  // strict: first occurrence wins on ties
        best = cand;
        at = t;
      }
    }
    v.data[j] = best;
    argmax[j] = at;
  }
  auto n = make_node(std::move(v), {X});
  Node* self = n.get();
  Node* pX = X.get();
  n->backprop = [self, pX, argmax, d] {
    if (!pX->requires_grad) return;
    for (std::size_t j = 0; j < d; ++j)
      pX->grad.data[argmax[j] * d + j] += self->grad.data[j];
  };
  return n;
}

NodePtr g_dropout(const NodePtr& x, Tensor mask) {
  if (!x->value.same_shape(mask)) {
    throw DimensionError("dropout: mask " + shape_str(mask) +
                         " does not conform with " + shape_str(x->value));
  }
  auto n = make_node(hadamard(x->value, mask), {x});
  Node* self = n.get();
  Node* px = x.get();
  auto m = std::make_shared<Tensor>(std::move(mask));
  n->backprop = [self, px, m] {
    if (!px->requires_grad) return;
    for (std::size_t i = 0; i < px->grad.data.size(); ++i)
      px->grad.data[i] += self->grad.data[i] * m->data[i];
  };
  return n;
}

NodePtr g_softmax(const NodePtr& logits) {
  auto n = make_node(softmax(logits->value), {logits});
  Node* self = n.get();
  Node* px = logits.get();
  n->backprop = [self, px] {
    if (!px->requires_grad) return;
    double dot_gp = 0.0;
    for (std::size_t i = 0; i < self->value.data.size(); ++i)
      dot_gp += self->grad.data[i] * self->value.data[i];
    for (std::size_t i = 0; i < self->value.data.size(); ++i)
      px->grad.data[i] +=
          self->value.data[i] * (self->grad.data[i] - dot_gp);
  };
  return n;
}

NodePtr g_cross_entropy(const NodePtr& probs, std::size_t label) {
  // cross_entropy() validates the label and applies the 1e-12 floor.
  const double loss = cross_entropy(probs->value, label);
  auto n = make_node(Tensor::vec({loss}), {probs});
  Node* self = n.get();
  Node* pp = probs.get();
  n->backprop = [self, pp, label] {
    if (!pp->requires_grad) return;
    const double p = std::max(pp->value.data[label], 1e-12);
    pp->grad.data[label] -= self->grad.data[0] / p;
  };
  return n;
}

}  // namespace affect
