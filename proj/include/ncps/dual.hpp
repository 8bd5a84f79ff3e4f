#pragma once

#include <Eigen/Core>

#include <cmath>
#include <ostream>
#include <type_traits>

namespace ncps {

// Forward-mode derivative scalar: value plus an N-component gradient.
// Nesting the scalar type (Dual<Dual<double, N>, N>) propagates exact
// second derivatives, which the nested-bracket checks rely on.
template <typename T, int N>
struct Dual {
  using Grad = Eigen::Matrix<T, N, 1>;

  T value;
  Grad grad;

  Dual() : value(T(0)), grad(Grad::Zero()) {}
  Dual(const T& v) : value(v), grad(Grad::Zero()) {}  // NOLINT: implicit by design
  Dual(const T& v, const Grad& g) : value(v), grad(g) {}

  template <typename U,
            std::enable_if_t<std::is_arithmetic_v<U> && !std::is_same_v<U, T>, int> = 0>
  Dual(U v) : value(T(static_cast<double>(v))), grad(Grad::Zero()) {}  // NOLINT

  // Variable seeded with unit derivative in slot i.
  static Dual seeded(const T& v, int i) {
    Dual d(v);
    d.grad[i] = T(1);
    return d;
  }

  Dual& operator+=(const Dual& o) {
    value += o.value;
    grad += o.grad;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    grad -= o.grad;
    return *this;
  }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend Dual operator-(const Dual& a) { return Dual(-a.value, (-a.grad).eval()); }

  friend Dual operator+(const Dual& a, const Dual& b) {
    return Dual(a.value + b.value, (a.grad + b.grad).eval());
  }
  friend Dual operator+(const Dual& a, double b) { return Dual(a.value + T(b), a.grad); }
  friend Dual operator+(double a, const Dual& b) { return Dual(T(a) + b.value, b.grad); }

  friend Dual operator-(const Dual& a, const Dual& b) {
    return Dual(a.value - b.value, (a.grad - b.grad).eval());
  }
  friend Dual operator-(const Dual& a, double b) { return Dual(a.value - T(b), a.grad); }
  friend Dual operator-(double a, const Dual& b) {
    return Dual(T(a) - b.value, (-b.grad).eval());
  }

  friend Dual operator*(const Dual& a, const Dual& b) {
    return Dual(a.value * b.value, (b.value * a.grad + a.value * b.grad).eval());
  }
  friend Dual operator*(const Dual& a, double b) {
    return Dual(a.value * T(b), (a.grad * T(b)).eval());
  }
  friend Dual operator*(double a, const Dual& b) {
    return Dual(T(a) * b.value, (T(a) * b.grad).eval());
  }

  friend Dual operator/(const Dual& a, const Dual& b) {
    const T inv = T(1) / b.value;
    const T q = a.value * inv;
    return Dual(q, ((a.grad - q * b.grad) * inv).eval());
  }
  friend Dual operator/(const Dual& a, double b) {
    const T inv = T(1.0 / b);
    return Dual(a.value * inv, (a.grad * inv).eval());
  }
  friend Dual operator/(double a, const Dual& b) {
    const T inv = T(1) / b.value;
    const T q = T(a) * inv;
    return Dual(q, ((-q * inv) * b.grad).eval());
  }

  friend bool operator<(const Dual& a, const Dual& b) { return a.value < b.value; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.value > b.value; }
  friend bool operator<=(const Dual& a, const Dual& b) { return a.value <= b.value; }
  friend bool operator>=(const Dual& a, const Dual& b) { return a.value >= b.value; }
  friend bool operator==(const Dual& a, const Dual& b) { return a.value == b.value; }
  friend bool operator!=(const Dual& a, const Dual& b) { return a.value != b.value; }

  friend std::ostream& operator<<(std::ostream& os, const Dual& d) {
    return os << d.value;
  }
};

template <typename T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  const T s = sqrt(a.value);
  return Dual<T, N>(s, (a.grad * (T(0.5) / s)).eval());
}

template <typename T, int N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return Dual<T, N>(sin(a.value), (a.grad * cos(a.value)).eval());
}

template <typename T, int N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  return Dual<T, N>(cos(a.value), (a.grad * (-sin(a.value))).eval());
}

template <typename T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using std::exp;
  const T e = exp(a.value);
  return Dual<T, N>(e, (a.grad * e).eval());
}

template <typename T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
  using std::log;
  return Dual<T, N>(log(a.value), (a.grad / a.value).eval());
}

template <typename T, int N>
Dual<T, N> abs(const Dual<T, N>& a) {
  return a.value < T(0) ? -a : a;
}

// Plain value of a possibly nested dual.
inline double scalar_value(double x) { return x; }
template <typename T, int N>
double scalar_value(const Dual<T, N>& d) {
  return scalar_value(d.value);
}

}  // namespace ncps

namespace Eigen {

template <typename T, int N>
struct NumTraits<ncps::Dual<T, N>> {
  using Real = ncps::Dual<T, N>;
  using NonInteger = ncps::Dual<T, N>;
  using Nested = ncps::Dual<T, N>;
  using Literal = ncps::Dual<T, N>;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    ReadCost = 1,
    AddCost = 1 + N,
    MulCost = 2 + 2 * N,
    RequireInitialization = 1,
  };

  static inline Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(NumTraits<double>::dummy_precision()); }
  static inline Real highest() { return Real(NumTraits<double>::highest()); }
  static inline Real lowest() { return Real(NumTraits<double>::lowest()); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

template <typename T, int N, typename BinaryOp>
struct ScalarBinaryOpTraits<ncps::Dual<T, N>, double, BinaryOp> {
  using ReturnType = ncps::Dual<T, N>;
};
template <typename T, int N, typename BinaryOp>
struct ScalarBinaryOpTraits<double, ncps::Dual<T, N>, BinaryOp> {
  using ReturnType = ncps::Dual<T, N>;
};

}  // namespace Eigen
