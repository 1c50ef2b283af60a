// Copyright 2026 The lipool Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cstdint>

#if defined(__F16C__)
#include <immintrin.h>
#endif

namespace lipool {

// Embedding matrices are row-major: one row per token / pooled vector.
template <class Scalar, int Rows = Eigen::Dynamic, int Cols = Eigen::Dynamic>
using RowMatrix = Eigen::Matrix<Scalar, Rows, Cols, Eigen::RowMajor>;

template <class Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic, Eigen::RowMajor>;

using MatrixF = RowMatrix<float>;
using RowVectorF = RowVector<float>;

// FP16 storage encoding. Conversion from float rounds to nearest even.
using Half = Eigen::half;
using MatrixH = RowMatrix<Half>;

template <class Derived>
MatrixH to_half(const Eigen::MatrixBase<Derived>& m) {
  return m.template cast<float>().template cast<Half>();
}

template <class Derived>
MatrixF to_float(const Eigen::MatrixBase<Derived>& m) {
  return m.template cast<float>();
}

/// Widens an FP16 matrix into `out`, reusing its storage. Every half value
/// is exactly representable in float, so the vector path and the scalar
/// fallback agree bit for bit.
inline void widen(const MatrixH& in, MatrixF& out) {
  out.resize(in.rows(), in.cols());
  const Eigen::Index n = in.size();
  const Half* src = in.data();
  float* dst = out.data();
  Eigen::Index i = 0;
#if defined(__F16C__)
  for (; i + 8 <= n; i += 8) {
    const __m128i h = _mm_loadu_si128(reinterpret_cast<const __m128i*>(src + i));
    _mm256_storeu_ps(dst + i, _mm256_cvtph_ps(h));
  }
#endif
  for (; i < n; ++i) dst[i] = static_cast<float>(src[i]);
}

inline std::uint16_t half_bits(Half h) { return Eigen::numext::bit_cast<std::uint16_t>(h); }
inline Half half_from_bits(std::uint16_t bits) { return Eigen::numext::bit_cast<Half>(bits); }

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.template cast<float>().allFinite();
}

/// L2-normalizes every row in place. Zero rows stay zero.
template <class Derived>
void normalize_rows(Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Scalar n = m.row(i).norm();
    if (n > Scalar(0)) m.row(i) /= n;
  }
}

}  // namespace lipool
