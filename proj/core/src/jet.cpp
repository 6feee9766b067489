#include "orthocurv/jet.hpp"

namespace orthocurv {

Jet operator/(const Jet& a, const Jet& b) {
  a.check_shape(b);
  const double v = b.value();
  if (v == 0.0) throw NumericError("jet division by zero");
  const double iv = 1.0 / v;
  return a * b.compose(iv, -iv * iv, 2.0 * iv * iv * iv, -6.0 * iv * iv * iv * iv);
}

Jet operator/(double s, const Jet& b) {
  const double v = b.value();
  if (v == 0.0) throw NumericError("jet division by zero");
  const double iv = 1.0 / v;
  return b.compose(s * iv, -s * iv * iv, 2.0 * s * iv * iv * iv, -6.0 * s * iv * iv * iv * iv);
}

Jet sin(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return u.compose(s, c, -s, -c);
}

Jet cos(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return u.compose(c, -s, -c, s);
}

Jet tan(const Jet& u) {
  const double c = std::cos(u.value());
  if (std::fabs(c) < 1e-154) throw NumericError("tan evaluated at a pole");
  const double t = std::tan(u.value());
  const double sec2 = 1.0 + t * t;
  // d tan = sec^2, d^2 tan = 2 t sec^2, d^3 tan = sec^2 (2 sec^2 + 4 t^2)
  return u.compose(t, sec2, 2.0 * t * sec2, sec2 * (2.0 * sec2 + 4.0 * t * t));
}

Jet exp(const Jet& u) {
  const double e = std::exp(u.value());
  return u.compose(e, e, e, e);
}

Jet log(const Jet& u) {
  const double v = u.value();
  if (v <= 0.0) throw NumericError("log of a nonpositive value");
  const double iv = 1.0 / v;
  return u.compose(std::log(v), iv, -iv * iv, 2.0 * iv * iv * iv);
}

Jet sqrt(const Jet& u) {
  const double v = u.value();
  if (v <= 0.0) throw NumericError("sqrt of a nonpositive value");
  const double r = std::sqrt(v);
  const double c1 = 0.5 / r;
  const double c2 = -0.25 / (v * r);
  const double c3 = 0.375 / (v * v * r);
  return u.compose(r, c1, c2, c3);
}

Jet powi(const Jet& u, long long n) {
  if (n == 0) return Jet::constant(1.0, u.dim(), u.order());
  const bool neg = n < 0;
  unsigned long long m = neg ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  Jet base = u;
  Jet acc = Jet::constant(1.0, u.dim(), u.order());
  bool acc_set = false;
  while (m) {
    if (m & 1ULL) {
      acc = acc_set ? acc * base : base;
      acc_set = true;
    }
    m >>= 1;
    if (m) base = base * base;
  }
  if (neg) return 1.0 / acc;
  return acc;
}

Jet pow(const Jet& u, const Jet& w) {
  if (u.value() <= 0.0)
    throw NumericError("pow with non-integer exponent needs a positive base");
  return exp(w * log(u));
}

}  // namespace orthocurv
