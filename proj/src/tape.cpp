#include "lwrfno/tape.hpp"

#include <cmath>
#include <stdexcept>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace lwrfno {

namespace {

#if defined(__GLIBC__)
// Tape buffers are multi-megabyte and recycled once per sample. Keep them on
// the heap instead of letting glibc route them through mmap/munmap, which
// would re-fault the pages on every training step.
const bool malloc_tuned = [] {
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
  return true;
}();
#endif

void require_same_size(const Tensor& a, const Tensor& b, const char* who) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(who) + ": size mismatch");
}

}  // namespace

int Tape::leaf(Tensor value) {
  Node n{};
  n.op = Op::leaf;
  n.val = std::move(value);
  return push(std::move(n));
}

int Tape::cleaf(CTensor value) {
  Node n{};
  n.op = Op::cleaf;
  n.cval = std::move(value);
  return push(std::move(n));
}

int Tape::leaf_ref(const Tensor& value) {
  Node n{};
  n.op = Op::leaf;
  n.borrow = &value;
  return push(std::move(n));
}

int Tape::cleaf_ref(const CTensor& value) {
  Node n{};
  n.op = Op::cleaf;
  n.cborrow = &value;
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  require_same_size(value(a), value(b), "tape::add");
  Node n{};
  n.op = Op::add;
  n.in = {a, b, -1};
  n.val = value(a);
  const Tensor& bv = value(b);
  for (std::size_t k = 0; k < n.val.size(); ++k) n.val[k] += bv[k];
  return push(std::move(n));
}

int Tape::scale(int a, double s) {
  Node n{};
  n.op = Op::scale;
  n.in = {a, -1, -1};
  n.scalar = s;
  n.val = value(a);
  for (std::size_t k = 0; k < n.val.size(); ++k) n.val[k] *= s;
  return push(std::move(n));
}

int Tape::mul(int a, int b) {
  require_same_size(value(a), value(b), "tape::mul");
  Node n{};
  n.op = Op::mul;
  n.in = {a, b, -1};
  n.val = value(a);
  const Tensor& bv = value(b);
  for (std::size_t k = 0; k < n.val.size(); ++k) n.val[k] *= bv[k];
  return push(std::move(n));
}

int Tape::sum(int a) {
  Node n{};
  n.op = Op::sum;
  n.in = {a, -1, -1};
  double s = 0.0;
  const Tensor& av = value(a);
  for (std::size_t k = 0; k < av.size(); ++k) s += av[k];
  n.val = Tensor::scalar(s);
  return push(std::move(n));
}

int Tape::sub_const(int a, const Tensor& c) {
  require_same_size(value(a), c, "tape::sub_const");
  Node n{};
  n.op = Op::sub_const;
  n.in = {a, -1, -1};
  n.val = value(a);
  for (std::size_t k = 0; k < n.val.size(); ++k) n.val[k] -= c[k];
  return push(std::move(n));
}

int Tape::l2norm(int a) {
  Node n{};
  n.op = Op::l2norm;
  n.in = {a, -1, -1};
  double s = 0.0;
  const Tensor& av = value(a);
  for (std::size_t k = 0; k < av.size(); ++k) s += av[k] * av[k];
  n.val = Tensor::scalar(std::sqrt(s));
  return push(std::move(n));
}

int Tape::pointwise_linear(int x, int w, int b) {
  Node n{};
  n.op = Op::pointwise_linear;
  n.in = {x, w, b};
  n.val = lwrfno::pointwise_linear(value(x), value(w), value(b));
  return push(std::move(n));
}

int Tape::activation(int x, Activation act) {
  Node n{};
  n.op = Op::activation;
  n.in = {x, -1, -1};
  n.val = activation_forward(value(x), act, &n.saved);
  return push(std::move(n));
}

int Tape::to_complex(int x) {
  Node n{};
  n.op = Op::to_complex;
  n.in = {x, -1, -1};
  n.cval = lwrfno::to_complex(value(x));
  return push(std::move(n));
}

int Tape::take_real(int x) {
  Node n{};
  n.op = Op::take_real;
  n.in = {x, -1, -1};
  n.val = lwrfno::take_real(cvalue(x));
  return push(std::move(n));
}

int Tape::fft2(int x) {
  Node n{};
  n.op = Op::fft2;
  n.in = {x, -1, -1};
  n.cval = fft::fft2(cvalue(x));
  return push(std::move(n));
}

int Tape::ifft2(int x) {
  Node n{};
  n.op = Op::ifft2;
  n.in = {x, -1, -1};
  n.cval = fft::ifft2(cvalue(x));
  return push(std::move(n));
}

int Tape::fft2_real(int x) {
  Node n{};
  n.op = Op::fft2_real;
  n.in = {x, -1, -1};
  n.cval = fft::fft2_real(value(x));
  return push(std::move(n));
}

int Tape::ifft2_real(int x) {
  Node n{};
  n.op = Op::ifft2_real;
  n.in = {x, -1, -1};
  n.val = fft::ifft2_real(cvalue(x));
  return push(std::move(n));
}

int Tape::spectral_mul(int x, int r) {
  Node n{};
  n.op = Op::spectral_mul;
  n.in = {x, r, -1};
  n.cval = spectral_multiply(cvalue(x), cvalue(r));
  return push(std::move(n));
}

int Tape::spectral_conv(int x, int r) {
  Node n{};
  n.op = Op::spectral_conv;
  n.in = {x, r, -1};
  // cval holds the retained-mode forward spectrum for the backward pass
  n.val = lwrfno::spectral_conv(value(x), cvalue(r), &n.cval);
  return push(std::move(n));
}

int Tape::conservation_residual(int x, const FundamentalDiagram& fd, const GridSpec& grid) {
  Node n{};
  n.op = Op::conservation_residual;
  n.in = {x, -1, -1};
  n.residual = std::make_unique<ResidualRecord>(fd, grid);
  n.val = lwrfno::conservation_residual(value(x), fd, grid, n.residual.get());
  return push(std::move(n));
}

void Tape::accum(int id, Tensor&& g) {
  Node& n = nodes_[id];
  if (n.grad.empty()) {
    n.grad = std::move(g);
  } else {
    for (std::size_t k = 0; k < n.grad.size(); ++k) n.grad[k] += g[k];
  }
}

void Tape::accum(int id, CTensor&& g) {
  Node& n = nodes_[id];
  if (n.cgrad.empty()) {
    n.cgrad = std::move(g);
  } else {
    for (std::size_t k = 0; k < n.cgrad.size(); ++k) n.cgrad[k] += g[k];
  }
}

void Tape::backward(int loss) {
  if (value(loss).size() != 1)
    throw std::invalid_argument("tape::backward: loss must be a scalar node");
  accum(loss, Tensor::scalar(1.0));

  for (int id = static_cast<int>(nodes_.size()) - 1; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.empty() && n.cgrad.empty()) continue;

    switch (n.op) {
      case Op::leaf:
      case Op::cleaf:
        break;
      case Op::add: {
        accum(n.in[1], Tensor(n.grad));
        accum(n.in[0], std::move(n.grad));  // n.grad is dead after this node
        break;
      }
      case Op::scale: {
        for (std::size_t k = 0; k < n.grad.size(); ++k) n.grad[k] *= n.scalar;
        accum(n.in[0], std::move(n.grad));
        break;
      }
      case Op::mul: {
        const Tensor& av = value(n.in[0]);
        const Tensor& bv = value(n.in[1]);
        Tensor gb(n.grad);
        for (std::size_t k = 0; k < gb.size(); ++k) gb[k] *= av[k];
        accum(n.in[1], std::move(gb));
        for (std::size_t k = 0; k < n.grad.size(); ++k) n.grad[k] *= bv[k];
        accum(n.in[0], std::move(n.grad));
        break;
      }
      case Op::sum: {
        accum(n.in[0], Tensor::full(value(n.in[0]).shape(), n.grad[0]));
        break;
      }
      case Op::sub_const: {
        accum(n.in[0], std::move(n.grad));
        break;
      }
      case Op::l2norm: {
        // d||x||/dx = x/||x||; subgradient 0 at the origin
        const double norm = n.val[0];
        if (norm > 0.0) {
          const Tensor& xv = value(n.in[0]);
          const double g = n.grad[0] / norm;
          Tensor gx(xv);
          for (std::size_t k = 0; k < gx.size(); ++k) gx[k] *= g;
          accum(n.in[0], std::move(gx));
        }
        break;
      }
      case Op::pointwise_linear: {
        Tensor gx, gw, gb;
        pointwise_linear_backward(n.grad, value(n.in[0]), value(n.in[1]), gx, gw, gb);
        accum(n.in[0], std::move(gx));
        accum(n.in[1], std::move(gw));
        accum(n.in[2], std::move(gb));
        break;
      }
      case Op::activation: {
        for (std::size_t k = 0; k < n.grad.size(); ++k) n.grad[k] *= n.saved[k];
        accum(n.in[0], std::move(n.grad));
        break;
      }
      case Op::to_complex: {
        accum(n.in[0], lwrfno::take_real(n.cgrad));
        break;
      }
      case Op::take_real: {
        accum(n.in[0], lwrfno::to_complex(n.grad));
        break;
      }
      case Op::fft2: {
        // adjoint of the unnormalized forward DFT is the unnormalized inverse
        accum(n.in[0], fft::fft2_adjoint(n.cgrad));
        break;
      }
      case Op::ifft2: {
        CTensor g = fft::fft2(n.cgrad);
        const auto& shape = n.cval.shape();
        const double norm =
            1.0 / static_cast<double>(shape[shape.size() - 2] * shape[shape.size() - 1]);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] *= norm;
        accum(n.in[0], std::move(g));
        break;
      }
      case Op::fft2_real: {
        accum(n.in[0], lwrfno::take_real(fft::fft2_adjoint(n.cgrad)));
        break;
      }
      case Op::ifft2_real: {
        CTensor g = fft::fft2_real(n.grad);
        const auto& shape = n.val.shape();
        const double norm =
            1.0 / static_cast<double>(shape[shape.size() - 2] * shape[shape.size() - 1]);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] *= norm;
        accum(n.in[0], std::move(g));
        break;
      }
      case Op::spectral_mul: {
        CTensor gx, gr;
        spectral_multiply_backward(n.cgrad, cvalue(n.in[0]), cvalue(n.in[1]), gx, gr);
        accum(n.in[0], std::move(gx));
        accum(n.in[1], std::move(gr));
        break;
      }
      case Op::spectral_conv: {
        Tensor gz;
        CTensor gr;
        spectral_conv_backward(n.grad, n.cval, cvalue(n.in[1]), gz, gr);
        accum(n.in[0], std::move(gz));
        accum(n.in[1], std::move(gr));
        break;
      }
      case Op::conservation_residual: {
        Tensor gf;
        conservation_residual_backward(n.grad, value(n.in[0]), *n.residual, gf);
        accum(n.in[0], std::move(gf));
        break;
      }
    }
  }
}

}  // namespace lwrfno
