#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace lwrfno {

using cplx = std::complex<double>;

/// Dense row-major tensor of 64-bit reals. Rank is small (<= 4 in practice);
/// shape arithmetic stays out of the hot loops, which index flat data.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::int64_t> shape)
      : shape_(std::move(shape)), data_(count(shape_), 0.0) {}
  Tensor(std::vector<std::int64_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != count(shape_))
      throw std::invalid_argument("Tensor: data length does not match shape");
  }

  static Tensor scalar(double v) { return Tensor({1}, {v}); }
  static Tensor full(std::vector<std::int64_t> shape, double v) {
    Tensor t(std::move(shape));
    for (auto& x : t.data_) x = v;
    return t;
  }

  const std::vector<std::int64_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  // (i, j) into the trailing two axes of a rank-2 tensor
  double& at2(std::int64_t i, std::int64_t j) { return data_[i * shape_[1] + j]; }
  double at2(std::int64_t i, std::int64_t j) const { return data_[i * shape_[1] + j]; }
  // (c, i, j) into a rank-3 tensor
  double& at3(std::int64_t c, std::int64_t i, std::int64_t j) {
    return data_[(c * shape_[1] + i) * shape_[2] + j];
  }
  double at3(std::int64_t c, std::int64_t i, std::int64_t j) const {
    return data_[(c * shape_[1] + i) * shape_[2] + j];
  }

  static std::size_t count(const std::vector<std::int64_t>& shape) {
    std::size_t n = 1;
    for (auto d : shape) {
      if (d < 0) throw std::invalid_argument("Tensor: negative dimension");
      n *= static_cast<std::size_t>(d);
    }
    return shape.empty() ? 0 : n;
  }

 private:
  std::vector<std::int64_t> shape_;
  std::vector<double> data_;
};

/// Complex counterpart of Tensor; same layout rules.
class CTensor {
 public:
  CTensor() = default;
  explicit CTensor(std::vector<std::int64_t> shape)
      : shape_(std::move(shape)), data_(Tensor::count(shape_), cplx{0.0, 0.0}) {}

  const std::vector<std::int64_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  cplx& operator[](std::size_t k) { return data_[k]; }
  const cplx& operator[](std::size_t k) const { return data_[k]; }

 private:
  std::vector<std::int64_t> shape_;
  std::vector<cplx> data_;
};

inline bool same_shape(const Tensor& a, const Tensor& b) { return a.shape() == b.shape(); }

inline double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Real inner product of complex tensors viewed as pairs of reals:
/// sum(Re a * Re b + Im a * Im b).
inline double dot_re(const CTensor& a, const CTensor& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  return s;
}

}  // namespace lwrfno
