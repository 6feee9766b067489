#pragma once

#include <array>
#include <cmath>
#include <cstring>

#include "orthocurv/util.hpp"

namespace orthocurv {

// Truncated multivariate Taylor scalar ("jet"): value, gradient, symmetric
// Hessian, symmetric third derivatives, up to order 3 in up to kMaxDim chart
// variables. Coefficients are true derivatives (no factorial scaling); mixed
// partials are stored once (packed i<=j resp. i<=j<=k). Copies touch only the
// active prefix, so low-dim/low-order jets stay cheap despite the inline
// storage. Domain violations (sqrt/log of nonpositive values, division by
// zero, ...) throw NumericError: a jet never carries NaN forward.
class Jet {
 public:
  static constexpr int kMaxDim = 8;
  static constexpr int kMaxCoef = 1 + kMaxDim + kMaxDim * (kMaxDim + 1) / 2 +
                                  kMaxDim * (kMaxDim + 1) * (kMaxDim + 2) / 6;

  Jet() : dim_(0), order_(0), n_(1) { c_[0] = 0.0; }

  static Jet constant(double v, int dim, int order) {
    Jet j(dim, order);
    j.c_[0] = v;
    for (int i = 1; i < j.n_; ++i) j.c_[i] = 0.0;
    return j;
  }

  static Jet variable(double v, int index, int dim, int order) {
    Jet j = constant(v, dim, order);
    if (index < 0 || index >= dim) throw NumericError("jet variable index out of range");
    if (order >= 1) j.c_[1 + index] = 1.0;
    return j;
  }

  Jet(const Jet& o) : dim_(o.dim_), order_(o.order_), n_(o.n_) {
    std::memcpy(c_.data(), o.c_.data(), sizeof(double) * static_cast<std::size_t>(n_));
  }
  Jet& operator=(const Jet& o) {
    dim_ = o.dim_;
    order_ = o.order_;
    n_ = o.n_;
    std::memcpy(c_.data(), o.c_.data(), sizeof(double) * static_cast<std::size_t>(n_));
    return *this;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  int ncoef() const { return n_; }

  double value() const { return c_[0]; }
  double grad(int i) const { return order_ >= 1 ? c_[1 + i] : 0.0; }
  double hess(int i, int j) const {
    if (order_ < 2) return 0.0;
    return c_[hbase() + idx2(i, j)];
  }
  double third(int i, int j, int k) const {
    if (order_ < 3) return 0.0;
    return c_[tbase() + idx3(i, j, k)];
  }

  double& at(int flat) { return c_[flat]; }
  double at(int flat) const { return c_[flat]; }

  // d/dx_index as a jet one order lower; the backbone of field calculus.
  Jet partial(int index) const {
    if (order_ < 1) throw NumericError("jet partial() needs order >= 1");
    Jet r(dim_, order_ - 1);
    r.c_[0] = grad(index);
    if (r.order_ >= 1)
      for (int i = 0; i < dim_; ++i) r.c_[1 + i] = hess(index, i);
    if (r.order_ >= 2)
      for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) r.c_[r.hbase() + r.idx2(i, j)] = third(index, i, j);
    return r;
  }

  // Truncation to a lower order (used when mixing cached jets of different depth).
  Jet truncated(int order) const {
    if (order >= order_) return *this;
    Jet r(dim_, order);
    std::memcpy(r.c_.data(), c_.data(), sizeof(double) * static_cast<std::size_t>(r.n_));
    return r;
  }

  Jet operator-() const {
    Jet r(*this);
    for (int i = 0; i < n_; ++i) r.c_[i] = -r.c_[i];
    return r;
  }

  Jet& operator+=(const Jet& b) {
    check_shape(b);
    for (int i = 0; i < n_; ++i) c_[i] += b.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& b) {
    check_shape(b);
    for (int i = 0; i < n_; ++i) c_[i] -= b.c_[i];
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(double s) {
    for (int i = 0; i < n_; ++i) c_[i] *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_shape(b);
    const int d = a.dim_;
    Jet r(d, a.order_);
    const double av = a.c_[0], bv = b.c_[0];
    r.c_[0] = av * bv;
    if (a.order_ >= 1)
      for (int i = 0; i < d; ++i) r.c_[1 + i] = a.c_[1 + i] * bv + av * b.c_[1 + i];
    if (a.order_ >= 2) {
      const int hb = r.hbase();
      int p = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j, ++p)
          r.c_[hb + p] = a.c_[hb + p] * bv + av * b.c_[hb + p] +
                         a.c_[1 + i] * b.c_[1 + j] + a.c_[1 + j] * b.c_[1 + i];
    }
    if (a.order_ >= 3) {
      const int hb = r.hbase();
      const int tb = r.tbase();
      int p = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
          for (int k = j; k < d; ++k, ++p) {
            const int hij = hb + r.idx2(i, j), hik = hb + r.idx2(i, k), hjk = hb + r.idx2(j, k);
            r.c_[tb + p] = a.c_[tb + p] * bv + av * b.c_[tb + p] +
                           a.c_[hij] * b.c_[1 + k] + a.c_[hik] * b.c_[1 + j] +
                           a.c_[hjk] * b.c_[1 + i] + a.c_[1 + k] * b.c_[hij] +
                           a.c_[1 + j] * b.c_[hik] + a.c_[1 + i] * b.c_[hjk];
          }
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(double s, const Jet& b);

  // phi composed with this jet, given derivatives of phi at the value.
  Jet compose(double c0, double c1, double c2, double c3) const {
    const int d = dim_;
    Jet r(d, order_);
    r.c_[0] = c0;
    if (order_ >= 1)
      for (int i = 0; i < d; ++i) r.c_[1 + i] = c1 * c_[1 + i];
    if (order_ >= 2) {
      const int hb = hbase();
      int p = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j, ++p)
          r.c_[hb + p] = c1 * c_[hb + p] + c2 * c_[1 + i] * c_[1 + j];
    }
    if (order_ >= 3) {
      const int hb = hbase(), tb = tbase();
      int p = 0;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
          for (int k = j; k < d; ++k, ++p)
            r.c_[tb + p] = c1 * c_[tb + p] +
                           c2 * (c_[1 + i] * c_[hb + idx2(j, k)] +
                                 c_[1 + j] * c_[hb + idx2(i, k)] +
                                 c_[1 + k] * c_[hb + idx2(i, j)]) +
                           c3 * c_[1 + i] * c_[1 + j] * c_[1 + k];
    }
    return r;
  }

  int hbase() const { return 1 + dim_; }
  int tbase() const { return 1 + dim_ + dim_ * (dim_ + 1) / 2; }
  int idx2(int i, int j) const {
    if (i > j) std::swap(i, j);
    return i * dim_ - i * (i - 1) / 2 + (j - i);
  }
  int idx3(int i, int j, int k) const {
    if (i > j) std::swap(i, j);
    if (j > k) std::swap(j, k);
    if (i > j) std::swap(i, j);
    const int m = dim_ - i;  // suffix length once first index fixed
    const int off_i = dim_ * (dim_ + 1) * (dim_ + 2) / 6 - m * (m + 1) * (m + 2) / 6;
    const int jj = j - i, kk = k - i;
    return off_i + jj * m - jj * (jj - 1) / 2 + (kk - jj);
  }

 private:
  Jet(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 0 || dim > kMaxDim) throw NumericError("jet dimension outside [0,8]");
    if (order < 0 || order > 3) throw NumericError("jet order outside [0,3]");
    n_ = 1;
    if (order >= 1) n_ += dim;
    if (order >= 2) n_ += dim * (dim + 1) / 2;
    if (order >= 3) n_ += dim * (dim + 1) * (dim + 2) / 6;
  }

  void check_shape(const Jet& b) const {
    if (dim_ != b.dim_ || order_ != b.order_)
      throw NumericError("jet shape mismatch (dim/order)");
  }

  int dim_;
  int order_;
  int n_;
  std::array<double, kMaxCoef> c_;
};

Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet tan(const Jet& u);
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet sqrt(const Jet& u);
Jet powi(const Jet& u, long long n);      // integer exponent, handles sign/negative base
Jet pow(const Jet& u, const Jet& w);      // general: exp(w log u), needs u > 0

}  // namespace orthocurv
