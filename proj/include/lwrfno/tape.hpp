#pragma once

#include <array>
#include <memory>
#include <vector>

#include "lwrfno/fft.hpp"
#include "lwrfno/kernels.hpp"
#include "lwrfno/tensor.hpp"

namespace lwrfno {

/// Define-by-run reverse-mode tape over the fixed operator set of the
/// network and its losses. Every op computes its value eagerly and records
/// one node; backward() walks the nodes once in reverse creation order.
/// Activations are stored, nothing is recomputed. Complex leaves follow the
/// independent-reals convention: the gradient of a complex value z holds
/// dL/d(Re z) + i * dL/d(Im z).
class Tape {
 public:
  // leaves; the _ref forms borrow the caller's storage, which must outlive
  // the tape (used for parameters shared across many tapes)
  int leaf(Tensor value);
  int cleaf(CTensor value);
  int leaf_ref(const Tensor& value);
  int cleaf_ref(const CTensor& value);

  // elementwise / reductions (real)
  int add(int a, int b);
  int scale(int a, double s);
  int mul(int a, int b);
  int sum(int a);
  int sub_const(int a, const Tensor& c);
  int l2norm(int a);

  // network ops
  int pointwise_linear(int x, int w, int b);
  int activation(int x, Activation act);
  int to_complex(int x);
  int take_real(int x);
  int fft2(int x);
  int ifft2(int x);
  int fft2_real(int x);   // fused to_complex + fft2
  int ifft2_real(int x);  // fused ifft2 + take_real
  int spectral_mul(int x, int r);
  int spectral_conv(int x, int r);  // fused Re(ifft2(spectral_mul(fft2(x), r)))
  int conservation_residual(int x, const FundamentalDiagram& fd, const GridSpec& grid);

  const Tensor& value(int id) const {
    return nodes_[id].borrow ? *nodes_[id].borrow : nodes_[id].val;
  }
  const CTensor& cvalue(int id) const {
    return nodes_[id].cborrow ? *nodes_[id].cborrow : nodes_[id].cval;
  }
  double scalar_value(int id) const { return value(id)[0]; }

  /// Seeds d(loss)/d(loss) = 1 and accumulates adjoints backwards through
  /// every node. `loss` must be a single-element real node. Leaf gradients
  /// stay valid afterwards; interior gradient buffers are recycled during
  /// the sweep, so query leaves only.
  void backward(int loss);

  const Tensor& grad(int id) const { return nodes_[id].grad; }
  const CTensor& cgrad(int id) const { return nodes_[id].cgrad; }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op {
    leaf, cleaf, add, scale, mul, sum, sub_const, l2norm,
    pointwise_linear, activation, to_complex, take_real,
    fft2, ifft2, fft2_real, ifft2_real, spectral_mul, spectral_conv,
    conservation_residual,
  };

  struct Node {
    Op op;
    std::array<int, 3> in{-1, -1, -1};
    Tensor val;
    CTensor cval;
    const Tensor* borrow = nullptr;
    const CTensor* cborrow = nullptr;
    Tensor grad;
    CTensor cgrad;
    Tensor saved;        // activation derivative
    Tensor const_val;    // sub_const operand
    double scalar = 0.0; // scale factor
    std::unique_ptr<ResidualRecord> residual;
  };

  int push(Node&& n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }
  // move-assign on first touch, accumulate afterwards (no zero-fill pass)
  void accum(int id, Tensor&& g);
  void accum(int id, CTensor&& g);

  std::vector<Node> nodes_;
};

}  // namespace lwrfno
