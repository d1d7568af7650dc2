#ifndef ADFEM_DUAL_HPP
#define ADFEM_DUAL_HPP

#include <array>
#include <cmath>
#include <stdexcept>

namespace adfem {

// Forward-mode dual number carrying a fixed block of tangent lanes.
// A Dual<L> propagates L directional derivatives alongside the value, so a
// kernel evaluated once with L seeded inputs yields L Jacobian columns.
//
// The supported primitive set is fixed: +, -, *, /, pow, sqrt, and
// comparisons on the value part. Fixed-size matrix products and tensor
// contractions are plain loops over these primitives, so kernels written
// against this set evaluate identically with double, Dual<1> (directional
// derivative) and Dual<8> (full element Jacobian) scalars.
template <int Lanes>
struct Dual {
  static_assert(Lanes >= 1, "Dual needs at least one tangent lane");

  double v = 0.0;
  std::array<double, Lanes> d{};

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT: implicit by design, constants enter kernels as-is

  static constexpr Dual seeded(double value, int lane) {
    Dual x(value);
    x.d[lane] = 1.0;
    return x;
  }
};

template <int L>
inline Dual<L> operator+(const Dual<L>& a, const Dual<L>& b) {
  Dual<L> r(a.v + b.v);
  for (int k = 0; k < L; ++k) r.d[k] = a.d[k] + b.d[k];
  return r;
}
template <int L>
inline Dual<L> operator+(const Dual<L>& a, double b) {
  Dual<L> r = a;
  r.v += b;
  return r;
}
template <int L>
inline Dual<L> operator+(double a, const Dual<L>& b) {
  return b + a;
}

template <int L>
inline Dual<L> operator-(const Dual<L>& a) {
  Dual<L> r(-a.v);
  for (int k = 0; k < L; ++k) r.d[k] = -a.d[k];
  return r;
}
template <int L>
inline Dual<L> operator-(const Dual<L>& a, const Dual<L>& b) {
  Dual<L> r(a.v - b.v);
  for (int k = 0; k < L; ++k) r.d[k] = a.d[k] - b.d[k];
  return r;
}
template <int L>
inline Dual<L> operator-(const Dual<L>& a, double b) {
  Dual<L> r = a;
  r.v -= b;
  return r;
}
template <int L>
inline Dual<L> operator-(double a, const Dual<L>& b) {
  Dual<L> r(a - b.v);
  for (int k = 0; k < L; ++k) r.d[k] = -b.d[k];
  return r;
}

template <int L>
inline Dual<L> operator*(const Dual<L>& a, const Dual<L>& b) {
  Dual<L> r(a.v * b.v);
  for (int k = 0; k < L; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
  return r;
}
template <int L>
inline Dual<L> operator*(const Dual<L>& a, double b) {
  Dual<L> r(a.v * b);
  for (int k = 0; k < L; ++k) r.d[k] = a.d[k] * b;
  return r;
}
template <int L>
inline Dual<L> operator*(double a, const Dual<L>& b) {
  return b * a;
}

template <int L>
inline Dual<L> operator/(const Dual<L>& a, const Dual<L>& b) {
  if (b.v == 0.0) throw std::domain_error("dual division by zero-valued denominator");
  const double inv = 1.0 / b.v;
  Dual<L> r(a.v * inv);
  for (int k = 0; k < L; ++k) r.d[k] = (a.d[k] - r.v * b.d[k]) * inv;
  return r;
}
template <int L>
inline Dual<L> operator/(const Dual<L>& a, double b) {
  const double inv = 1.0 / b;
  Dual<L> r(a.v * inv);
  for (int k = 0; k < L; ++k) r.d[k] = a.d[k] * inv;
  return r;
}
template <int L>
inline Dual<L> operator/(double a, const Dual<L>& b) {
  if (b.v == 0.0) throw std::domain_error("dual division by zero-valued denominator");
  const double inv = 1.0 / b.v;
  Dual<L> r(a * inv);
  for (int k = 0; k < L; ++k) r.d[k] = -r.v * b.d[k] * inv;
  return r;
}

template <int L>
inline Dual<L>& operator+=(Dual<L>& a, const Dual<L>& b) {
  a = a + b;
  return a;
}
template <int L>
inline Dual<L>& operator-=(Dual<L>& a, const Dual<L>& b) {
  a = a - b;
  return a;
}
template <int L>
inline Dual<L>& operator*=(Dual<L>& a, const Dual<L>& b) {
  a = a * b;
  return a;
}

// Comparisons act on the value part; mixed double forms go through the
// implicit constructor.
template <int L>
inline bool operator<(const Dual<L>& a, const Dual<L>& b) {
  return a.v < b.v;
}
template <int L>
inline bool operator>(const Dual<L>& a, const Dual<L>& b) {
  return a.v > b.v;
}
template <int L>
inline bool operator<=(const Dual<L>& a, const Dual<L>& b) {
  return a.v <= b.v;
}
template <int L>
inline bool operator>=(const Dual<L>& a, const Dual<L>& b) {
  return a.v >= b.v;
}
template <int L>
inline bool operator==(const Dual<L>& a, const Dual<L>& b) {
  return a.v == b.v;
}
template <int L>
inline bool operator!=(const Dual<L>& a, const Dual<L>& b) {
  return a.v != b.v;
}

template <int L>
inline Dual<L> sqrt(const Dual<L>& a) {
  const double s = std::sqrt(a.v);
  Dual<L> r(s);
  const double g = 0.5 / s;
  for (int k = 0; k < L; ++k) r.d[k] = g * a.d[k];
  return r;
}

template <int L>
inline Dual<L> pow(const Dual<L>& a, double p) {
  Dual<L> r(std::pow(a.v, p));
  const double g = p * std::pow(a.v, p - 1.0);
  for (int k = 0; k < L; ++k) r.d[k] = g * a.d[k];
  return r;
}

inline constexpr double value_of(double x) { return x; }
template <int L>
inline double value_of(const Dual<L>& x) {
  return x.v;
}

}  // namespace adfem

#endif  // ADFEM_DUAL_HPP
