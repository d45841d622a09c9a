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


#include "kickshape/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "kickshape/error.hpp"

namespace kickshape {

bool is_symmetric(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

double min_eigenvalue(const Matrix& s) {
    if (s.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Matrix psd_sqrt(const Matrix& q, double clip) {
    if (q.rows() != q.cols()) throw Error(ErrorCode::kShape, "psd_sqrt needs a square matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(q));
    Vector ev = es.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (!std::isfinite(ev[i])) throw Error(ErrorCode::kFactorization, "non-finite eigenvalue");
        if (ev[i] < -clip * scale) {
            throw Error(ErrorCode::kFactorization,
                        "matrix is not PSD (eigenvalue " + std::to_string(ev[i]) + ")");
        }
        ev[i] = std::sqrt(std::max(ev[i], 0.0));
    }
    const Matrix& v = es.eigenvectors();
    return v * ev.asDiagonal() * v.transpose();
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || q.rows() != n || q.cols() != n) {
        throw Error(ErrorCode::kShape, "solve_lyapunov dimension mismatch");
    }
    // vec(AX + XA^T) = (I (x) A + A (x) I) vec(X)
    const Matrix id = Matrix::Identity(n, n);
    Matrix kron(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            kron.block(i * n, j * n, n, n) = id(i, j) * a + a(i, j) * id;
        }
    }
    Vector rhs = -Eigen::Map<const Vector>(q.data(), n * n);
    Eigen::FullPivLU<Matrix> lu(kron);
    if (!lu.isInvertible()) throw Error(ErrorCode::kValidity, "Lyapunov operator is singular");
    Vector x = lu.solve(rhs);
    return symmetrized(Eigen::Map<Matrix>(x.data(), n, n));
}

bool is_hurwitz(const Matrix& a) {
    Eigen::EigenSolver<Matrix> es(a, false);
    return (es.eigenvalues().real().array() < 0.0).all();
}

}  // namespace kickshape
