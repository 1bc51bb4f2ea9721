// Copyright (c) 2026 The MTGAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTGAN_DUAL_HPP_
#define MTGAN_DUAL_HPP_

#include <cmath>
#include <type_traits>

namespace mtgan {

/// First-order forward-mode scalar: value plus one tangent component.
///
/// Running a network's backward pass on Dual inputs yields, in the tangent
/// part of the parameter gradients, the directional derivative of that
/// gradient along the input tangent. The gradient penalty uses this to get
/// d/dtheta of <u, grad_x D> without a second reverse sweep.
template <typename T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  template <typename U>
    requires std::is_arithmetic_v<U>
  constexpr Dual(U value) : v(static_cast<T>(value)) {}
  constexpr Dual(T value, T tangent) : v(value), d(tangent) {}

  template <typename U>
    requires std::is_arithmetic_v<U>
  explicit constexpr operator U() const { return static_cast<U>(v); }

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    d = (d * o.v - v * o.d) / (o.v * o.v);
    v /= o.v;
    return *this;
  }
};

template <typename T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <typename T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <typename T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <typename T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <typename T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }

template <typename T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return a.v < b.v; }
template <typename T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return a.v > b.v; }
template <typename T> bool operator<=(const Dual<T>& a, const Dual<T>& b) { return a.v <= b.v; }
template <typename T> bool operator>=(const Dual<T>& a, const Dual<T>& b) { return a.v >= b.v; }
template <typename T> bool operator==(const Dual<T>& a, const Dual<T>& b) { return a.v == b.v && a.d == b.d; }

template <typename T> Dual<T> sqrt(const Dual<T>& a) {
  const T s = std::sqrt(a.v);
  return {s, a.d / (T(2) * s)};
}
template <typename T> Dual<T> exp(const Dual<T>& a) {
  const T e = std::exp(a.v);
  return {e, a.d * e};
}
template <typename T> Dual<T> log(const Dual<T>& a) { return {std::log(a.v), a.d / a.v}; }

template <typename T> struct is_dual : std::false_type {};
template <typename T> struct is_dual<Dual<T>> : std::true_type {};
template <typename T> inline constexpr bool is_dual_v = is_dual<T>::value;

/// Real part for logging, comparisons and NaN checks.
template <typename T> double ValueOf(const T& x) {
  if constexpr (is_dual_v<T>) {
    return static_cast<double>(x.v);
  } else {
    return static_cast<double>(x);
  }
}

}  // namespace mtgan

#endif  // MTGAN_DUAL_HPP_
