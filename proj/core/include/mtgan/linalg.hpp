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

#ifndef MTGAN_LINALG_HPP_
#define MTGAN_LINALG_HPP_

#include <cstddef>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "mtgan/dual.hpp"

namespace mtgan {

namespace detail {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
void EigenGemm(bool trans_a, bool trans_b, int m, int n, int k, const T* a,
                const T* b, T* c, bool accumulate) {
  Eigen::Map<RowMat<T>> C(c, m, n);
  // op(A) is m x k, op(B) is k x n; storage of A is (k x m) when transposed.
  Eigen::Map<const RowMat<T>> A(a, trans_a ? k : m, trans_a ? m : k);
  Eigen::Map<const RowMat<T>> B(b, trans_b ? n : k, trans_b ? k : n);
  if (!accumulate) C.setZero();
  if (trans_a && trans_b) {
    C.noalias() += A.transpose() * B.transpose();
  } else if (trans_a) {
    C.noalias() += A.transpose() * B;
  } else if (trans_b) {
    C.noalias() += A * B.transpose();
  } else {
    C.noalias() += A * B;
  }
}

}  // namespace detail

/// Row-major C (m x n) = op(A) * op(B), or C += op(A) * op(B).
template <typename T>
void Gemm(bool trans_a, bool trans_b, int m, int n, int k, const T* a,
          const T* b, T* c, bool accumulate = false) {
  if constexpr (std::is_floating_point_v<T>) {
    detail::EigenGemm(trans_a, trans_b, m, n, k, a, b, c, accumulate);
  } else {
    static_assert(is_dual_v<T>, "gemm supports float, double and Dual");
    using R = decltype(T{}.v);
    // (Av + e Ad)(Bv + e Bd) = AvBv + e (Ad Bv + Av Bd): three real products.
    const std::size_t na = static_cast<std::size_t>(m) * k;
    const std::size_t nb = static_cast<std::size_t>(k) * n;
    const std::size_t nc = static_cast<std::size_t>(m) * n;
    std::vector<R> av(na), ad(na), bv(nb), bd(nb), cv(nc), cd(nc);
    for (std::size_t i = 0; i < na; ++i) { av[i] = a[i].v; ad[i] = a[i].d; }
    for (std::size_t i = 0; i < nb; ++i) { bv[i] = b[i].v; bd[i] = b[i].d; }
    detail::EigenGemm(trans_a, trans_b, m, n, k, av.data(), bv.data(),
                       cv.data(), false);
    detail::EigenGemm(trans_a, trans_b, m, n, k, ad.data(), bv.data(),
                       cd.data(), false);
    detail::EigenGemm(trans_a, trans_b, m, n, k, av.data(), bd.data(),
                       cd.data(), true);
    for (std::size_t i = 0; i < nc; ++i) {
      if (accumulate) {
        c[i].v += cv[i];
        c[i].d += cd[i];
      } else {
        c[i] = T(cv[i], cd[i]);
      }
    }
  }
}

}  // namespace mtgan

#endif  // MTGAN_LINALG_HPP_
