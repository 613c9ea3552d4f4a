#pragma once

// Forward-mode derivative carriers used by the expression evaluator.
//
//   Taylor<T, N>  univariate truncated Taylor series, coefficients c_k = f^(k)/k!
//   Dual2<T, N>   value, gradient and Hessian in N variables
//
// Both are plain value types; elementary functions are found by ADL so that
// generic code can write `using std::sin; sin(x)` for any scalar.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>

namespace gcfl::ad {

template <typename T, int N>
struct Taylor {
  static_assert(N >= 0);
  std::array<T, N + 1> c{};

  Taylor() = default;
  explicit Taylor(T value) { c[0] = value; }

  static Taylor variable(T at) {
    Taylor t(at);
    if constexpr (N >= 1) t.c[1] = T(1);
    return t;
  }

  T value() const { return c[0]; }

  // k-th derivative at the expansion point.
  T derivative(int k) const {
    T fact = T(1);
    for (int i = 2; i <= k; ++i) fact *= T(i);
    return c[k] * fact;
  }

  // Series of d/dx, one order shorter.
  Taylor<T, (N > 0 ? N - 1 : 0)> differentiated() const {
    Taylor<T, (N > 0 ? N - 1 : 0)> d;
    for (int k = 0; k < N; ++k) d.c[k] = T(k + 1) * c[k + 1];
    return d;
  }
};

template <typename T, int N>
Taylor<T, N> operator+(Taylor<T, N> a, const Taylor<T, N>& b) {
  for (int k = 0; k <= N; ++k) a.c[k] += b.c[k];
  return a;
}
template <typename T, int N>
Taylor<T, N> operator-(Taylor<T, N> a, const Taylor<T, N>& b) {
  for (int k = 0; k <= N; ++k) a.c[k] -= b.c[k];
  return a;
}
template <typename T, int N>
Taylor<T, N> operator-(Taylor<T, N> a) {
  for (auto& v : a.c) v = -v;
  return a;
}
template <typename T, int N>
Taylor<T, N> operator*(const Taylor<T, N>& a, const Taylor<T, N>& b) {
  Taylor<T, N> r;
  for (int k = 0; k <= N; ++k) {
    T s = T(0);
    for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
    r.c[k] = s;
  }
  return r;
}
template <typename T, int N>
Taylor<T, N> operator*(T s, Taylor<T, N> a) {
  for (auto& v : a.c) v *= s;
  return a;
}
template <typename T, int N>
Taylor<T, N> operator/(const Taylor<T, N>& a, const Taylor<T, N>& b) {
  Taylor<T, N> r;
  for (int k = 0; k <= N; ++k) {
    T s = a.c[k];
    for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
    r.c[k] = s / b.c[0];
  }
  return r;
}

template <typename T, int N>
Taylor<T, N> exp(const Taylor<T, N>& a) {
  Taylor<T, N> r;
  r.c[0] = std::exp(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    T s = T(0);
    for (int j = 1; j <= k; ++j) s += T(j) * a.c[j] * r.c[k - j];
    r.c[k] = s / T(k);
  }
  return r;
}

template <typename T, int N>
Taylor<T, N> log(const Taylor<T, N>& a) {
  Taylor<T, N> r;
  r.c[0] = std::log(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    T s = T(0);
    for (int j = 1; j < k; ++j) s += T(j) * r.c[j] * a.c[k - j];
    r.c[k] = (a.c[k] - s / T(k)) / a.c[0];
  }
  return r;
}

template <typename T, int N>
void sincos(const Taylor<T, N>& a, Taylor<T, N>& s, Taylor<T, N>& co) {
  s.c[0] = std::sin(a.c[0]);
  co.c[0] = std::cos(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    T ss = T(0), cc = T(0);
    for (int j = 1; j <= k; ++j) {
      ss += T(j) * a.c[j] * co.c[k - j];
      cc += T(j) * a.c[j] * s.c[k - j];
    }
    s.c[k] = ss / T(k);
    co.c[k] = -cc / T(k);
  }
}

template <typename T, int N>
Taylor<T, N> sin(const Taylor<T, N>& a) {
  Taylor<T, N> s, c;
  sincos(a, s, c);
  return s;
}
template <typename T, int N>
Taylor<T, N> cos(const Taylor<T, N>& a) {
  Taylor<T, N> s, c;
  sincos(a, s, c);
  return c;
}
template <typename T, int N>
Taylor<T, N> tan(const Taylor<T, N>& a) {
  Taylor<T, N> s, c;
  sincos(a, s, c);
  return s / c;
}

template <typename T, int N>
Taylor<T, N> sqrt(const Taylor<T, N>& a) {
  Taylor<T, N> r;
  r.c[0] = std::sqrt(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    T s = a.c[k];
    for (int j = 1; j < k; ++j) s -= r.c[j] * r.c[k - j];
    r.c[k] = s / (T(2) * r.c[0]);
  }
  return r;
}

// a^p for real p; requires a(0) > 0 unless p is handled by powi.
template <typename T, int N>
Taylor<T, N> pow(const Taylor<T, N>& a, T p) {
  Taylor<T, N> r;
  r.c[0] = std::pow(a.c[0], p);
  for (int k = 1; k <= N; ++k) {
    T s = T(0);
    for (int j = 1; j <= k; ++j) s += ((p + T(1)) * T(j) - T(k)) * a.c[j] * r.c[k - j];
    r.c[k] = s / (T(k) * a.c[0]);
  }
  return r;
}

template <typename T, int N>
Taylor<T, N> abs(const Taylor<T, N>& a) {
  return a.c[0] < T(0) ? -a : a;
}

template <typename T, int N>
T value_of(const Taylor<T, N>& a) {
  return a.c[0];
}

// ---------------------------------------------------------------------------

template <typename T, int N>
struct Dual2 {
  using Vec = Eigen::Matrix<T, N, 1>;
  using Mat = Eigen::Matrix<T, N, N>;

  T v = T(0);
  Vec g = Vec::Zero();
  Mat H = Mat::Zero();

  Dual2() = default;
  explicit Dual2(T value) : v(value) {}

  static Dual2 variable(T at, int index) {
    Dual2 d(at);
    d.g(index) = T(1);
    return d;
  }

  T value() const { return v; }
};

// Composition with a scalar function given f(a), f'(a), f''(a).
template <typename T, int N>
Dual2<T, N> chain(const Dual2<T, N>& a, T f0, T f1, T f2) {
  Dual2<T, N> r;
  r.v = f0;
  r.g = f1 * a.g;
  r.H = f1 * a.H + f2 * (a.g * a.g.transpose());
  return r;
}

template <typename T, int N>
Dual2<T, N> operator+(Dual2<T, N> a, const Dual2<T, N>& b) {
  a.v += b.v;
  a.g += b.g;
  a.H += b.H;
  return a;
}
template <typename T, int N>
Dual2<T, N> operator-(Dual2<T, N> a, const Dual2<T, N>& b) {
  a.v -= b.v;
  a.g -= b.g;
  a.H -= b.H;
  return a;
}
template <typename T, int N>
Dual2<T, N> operator-(Dual2<T, N> a) {
  a.v = -a.v;
  a.g = -a.g;
  a.H = -a.H;
  return a;
}
template <typename T, int N>
Dual2<T, N> operator*(const Dual2<T, N>& a, const Dual2<T, N>& b) {
  Dual2<T, N> r;
  r.v = a.v * b.v;
  r.g = a.g * b.v + a.v * b.g;
  r.H = a.H * b.v + a.v * b.H + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}
template <typename T, int N>
Dual2<T, N> operator*(T s, Dual2<T, N> a) {
  a.v *= s;
  a.g *= s;
  a.H *= s;
  return a;
}
template <typename T, int N>
Dual2<T, N> operator/(const Dual2<T, N>& a, const Dual2<T, N>& b) {
  const T x = b.v;
  return a * chain(b, T(1) / x, -T(1) / (x * x), T(2) / (x * x * x));
}

template <typename T, int N>
Dual2<T, N> exp(const Dual2<T, N>& a) {
  const T e = std::exp(a.v);
  return chain(a, e, e, e);
}
template <typename T, int N>
Dual2<T, N> log(const Dual2<T, N>& a) {
  return chain(a, std::log(a.v), T(1) / a.v, -T(1) / (a.v * a.v));
}
template <typename T, int N>
Dual2<T, N> sin(const Dual2<T, N>& a) {
  const T s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, s, c, -s);
}
template <typename T, int N>
Dual2<T, N> cos(const Dual2<T, N>& a) {
  const T s = std::sin(a.v), c = std::cos(a.v);
  return chain(a, c, -s, -c);
}
template <typename T, int N>
Dual2<T, N> tan(const Dual2<T, N>& a) {
  const T t = std::tan(a.v);
  const T sec2 = T(1) + t * t;
  return chain(a, t, sec2, T(2) * t * sec2);
}
template <typename T, int N>
Dual2<T, N> sqrt(const Dual2<T, N>& a) {
  const T r = std::sqrt(a.v);
  return chain(a, r, T(0.5) / r, -T(0.25) / (r * a.v));
}
template <typename T, int N>
Dual2<T, N> pow(const Dual2<T, N>& a, T p) {
  const T f0 = std::pow(a.v, p);
  return chain(a, f0, p * std::pow(a.v, p - T(1)), p * (p - T(1)) * std::pow(a.v, p - T(2)));
}
template <typename T, int N>
Dual2<T, N> abs(const Dual2<T, N>& a) {
  return a.v < T(0) ? -a : a;
}

template <typename T, int N>
T value_of(const Dual2<T, N>& a) {
  return a.v;
}

}  // namespace gcfl::ad

namespace gcfl {

inline double value_of(double x) { return x; }
using ad::value_of;

// Integer power by repeated squaring; valid for negative bases.
template <typename S>
S powi(const S& base, long n) {
  if (n < 0) return S(1.0) / powi(base, -n);
  S result(1.0);
  S b = base;
  while (n > 0) {
    if (n & 1) result = result * b;
    n >>= 1;
    if (n > 0) b = b * b;
  }
  return result;
}

}  // namespace gcfl
