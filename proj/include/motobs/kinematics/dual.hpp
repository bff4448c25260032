#pragma once

#include <cmath>

#include <Eigen/Core>

namespace motobs {

/// Forward-mode dual number `value + tangent * eps` with eps^2 = 0.
///
/// Nesting (`Dual<Dual<double>>`) gives second directional derivatives:
/// seeding `x = {{q, v}, {v, 0}}` along a path q + t v yields
/// `f(x).tangent.tangent == d^2/dt^2 f(q + t v)`.
template <typename T>
struct Dual {
  T value{};
  T tangent{};

  constexpr Dual() = default;
  constexpr Dual(double v) : value(v), tangent(0.0) {}  // NOLINT: implicit lift
  constexpr Dual(T v, T t) : value(v), tangent(t) {}

  Dual& operator+=(const Dual& o) {
    value += o.value;
    tangent += o.tangent;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value -= o.value;
    tangent -= o.tangent;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    tangent = tangent * o.value + value * o.tangent;
    value *= o.value;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    tangent = (tangent * o.value - value * o.tangent) / (o.value * o.value);
    value /= o.value;
    return *this;
  }
};

template <typename T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.value, -a.tangent};
}
template <typename T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <typename T>
Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <typename T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <typename T>
Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}
template <typename T>
Dual<T> operator*(double s, const Dual<T>& a) {
  return {s * a.value, s * a.tangent};
}
template <typename T>
Dual<T> operator*(const Dual<T>& a, double s) {
  return {a.value * s, a.tangent * s};
}
template <typename T>
Dual<T> operator+(const Dual<T>& a, double s) {
  return {a.value + s, a.tangent};
}
template <typename T>
Dual<T> operator+(double s, const Dual<T>& a) {
  return {s + a.value, a.tangent};
}
template <typename T>
Dual<T> operator-(const Dual<T>& a, double s) {
  return {a.value - s, a.tangent};
}
template <typename T>
Dual<T> operator-(double s, const Dual<T>& a) {
  return {s - a.value, -a.tangent};
}
template <typename T>
bool operator==(const Dual<T>& a, const Dual<T>& b) {
  return a.value == b.value && a.tangent == b.tangent;
}
template <typename T>
bool operator!=(const Dual<T>& a, const Dual<T>& b) {
  return !(a == b);
}

template <typename T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.value), cos(a.value) * a.tangent};
}
template <typename T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.value), -sin(a.value) * a.tangent};
}

/// Seeds a first-order dual along one direction.
inline Dual<double> seed(double value, double direction) { return {value, direction}; }

/// Seeds a second-order dual for the path value + t * direction.
inline Dual<Dual<double>> seed2(double value, double direction) {
  return {Dual<double>{value, direction}, Dual<double>{direction, 0.0}};
}

}  // namespace motobs

namespace Eigen {

template <typename T>
struct NumTraits<motobs::Dual<T>> : NumTraits<double> {
  using Real = motobs::Dual<T>;
  using NonInteger = motobs::Dual<T>;
  using Nested = motobs::Dual<T>;
  using Literal = motobs::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost,
  };
};

}  // namespace Eigen
