// Copyright 2026 The kickshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <Eigen/Dense>

namespace kickshape {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Default PSD tolerance, relative to trace(S)/dim.
inline constexpr double kDefaultPsdTol = 1e-10;

template <class Derived>
auto symmetrized(const Eigen::MatrixBase<Derived>& m) {
    return (0.5 * (m + m.transpose())).eval();
}

bool is_symmetric(const Matrix& m, double tol = 1e-12);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& s);

/// Symmetric square root L (L = L^T, L*L = Q) of a PSD matrix. Eigenvalues in
/// [-clip * scale, 0) are treated as zero, anything lower is a factorization
/// error. scale is max(1, largest |eigenvalue|).
Matrix psd_sqrt(const Matrix& q, double clip = 1e-12);

/// Solves A X + X A^T + Q = 0 via the Kronecker form. Intended for the small
/// state dimensions used here.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

/// True when every eigenvalue of A has strictly negative real part.
bool is_hurwitz(const Matrix& a);

}  // namespace kickshape
