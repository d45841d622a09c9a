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


#include "kickshape/gaussian_model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "kickshape/error.hpp"

namespace kickshape {

SymplecticForm build_symplectic(int modes) {
    if (modes < 1) {
        throw Error(ErrorCode::kInvalidDimension,
                    "symplectic form needs at least one mode, got " + std::to_string(modes));
    }
    const int n = modes;
    SymplecticForm form;
    form.modes = n;
    form.J = Matrix::Zero(2 * n, 2 * n);
    form.J.topRightCorner(n, n) = Matrix::Identity(n, n);
    form.J.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
    return form;
}

void SystemMatrices::validate() const {
    const Eigen::Index d = A.rows();
    const Eigen::Index m = C.rows();
    if (A.cols() != d || d == 0) throw Error(ErrorCode::kShape, "A must be square and non-empty");
    if (C.cols() != d) throw Error(ErrorCode::kShape, "C must have as many columns as A");
    if (Q.rows() != d || Q.cols() != d) throw Error(ErrorCode::kShape, "Q must match A");
    if (N.rows() != m || N.cols() != d) throw Error(ErrorCode::kShape, "N must match C");
    if (eta.rows() != m || eta.cols() != m) throw Error(ErrorCode::kShape, "eta must be m x m");
    if (!is_symmetric(Q, 1e-12)) throw Error(ErrorCode::kValidity, "Q is not symmetric");
    const double qscale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    if (min_eigenvalue(Q) < -1e-12 * qscale) throw Error(ErrorCode::kValidity, "Q is not PSD");
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i != j && eta(i, j) != 0.0) throw Error(ErrorCode::kValidity, "eta is not diagonal");
        }
        if (!(eta(i, i) >= 0.0 && eta(i, i) <= 1.0)) {
            throw Error(ErrorCode::kValidity, "efficiency outside [0, 1]");
        }
    }
}

SystemMatrices matrices_from_collapse(const CollapseSet& cs) {
    const Eigen::Index d = cs.H.rows();
    if (d == 0 || d % 2 != 0 || cs.H.cols() != d) {
        throw Error(ErrorCode::kShape, "H must be 2n x 2n");
    }
    if (cs.c.rows() != d) throw Error(ErrorCode::kShape, "collapse vectors must have length 2n");
    if (cs.eta.size() != cs.c.cols()) throw Error(ErrorCode::kShape, "one efficiency per channel");
    if (!is_symmetric(cs.H)) throw Error(ErrorCode::kValidity, "H is not symmetric");
    for (Eigen::Index i = 0; i < cs.eta.size(); ++i) {
        if (!(cs.eta[i] >= 0.0 && cs.eta[i] <= 1.0)) {
            throw Error(ErrorCode::kValidity, "efficiency outside [0, 1]");
        }
    }

    const Matrix J = build_symplectic(static_cast<int>(d / 2)).J;
    const Eigen::MatrixXcd ccH = cs.c * cs.c.adjoint();

    SystemMatrices m;
    m.A = J * (cs.H + ccH.imag());
    m.C = 2.0 * cs.c.real().transpose();
    m.Q = symmetrized(J * ccH.real() * J.transpose());
    m.N = (J * cs.c.imag()).transpose();
    m.eta = cs.eta.asDiagonal();
    return m;
}

double uncertainty_margin(const Matrix& S, const SymplecticForm& J) {
    if (S.rows() != J.dimension() || S.cols() != J.dimension()) {
        throw Error(ErrorCode::kShape, "covariance does not match the symplectic form");
    }
    if (!is_symmetric(S, 1e-9)) throw Error(ErrorCode::kValidity, "covariance is not symmetric");
    Eigen::MatrixXcd h = S.cast<std::complex<double>>();
    h += std::complex<double>(0.0, 0.5) * J.J.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool check_uncertainty(const Matrix& S, const SymplecticForm& J, double tol) {
    return uncertainty_margin(S, J) >= -tol;
}

}  // namespace kickshape
