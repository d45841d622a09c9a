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

#include "kickshape/linalg.hpp"

namespace kickshape {

/// Canonical symplectic form for n bosonic modes in (q-block, p-block)
/// ordering: J = [[0, I], [-I, 0]].
struct SymplecticForm {
    int modes = 0;
    Matrix J;

    int dimension() const { return 2 * modes; }
};

SymplecticForm build_symplectic(int modes);

/// Mean and covariance of a conditional Gaussian state (filter, retrodiction
/// or impulse-error moments).
struct GaussianMoments {
    Vector mean;
    Matrix covariance;
    double time = 0.0;
};

/// Real matrices driving the forward/backward Riccati flows and the mean
/// filters: drift A (2n x 2n), measurement C (m x 2n), process noise Q
/// (2n x 2n), cross-correlation N (m x 2n), efficiencies eta (m x m diagonal).
struct SystemMatrices {
    Matrix A;
    Matrix C;
    Matrix Q;
    Matrix N;
    Matrix eta;

    Eigen::Index state_dim() const { return A.rows(); }
    Eigen::Index channels() const { return C.rows(); }

    /// Throws kShape on inconsistent dimensions and kValidity when Q is not
    /// symmetric PSD or eta is not diagonal with entries in [0, 1].
    void validate() const;
};

/// Quadratic Hamiltonian matrix and linear collapse channels of a Gaussian
/// open system. Column i of c is the complex collapse vector of channel i.
struct CollapseSet {
    Matrix H;
    Eigen::MatrixXcd c;
    Vector eta;
};

/// Maps Hamiltonian and collapse vectors onto the real moment matrices:
///   A = J (H + Im(c c^H)),  C = 2 Re(c)^T,  Q = J Re(c c^H) J^T,
///   N = (J Im(c))^T,        eta = diag(eta_1 .. eta_m).
SystemMatrices matrices_from_collapse(const CollapseSet& cs);

/// Minimum eigenvalue of the Hermitian matrix S + (i/2) J.
double uncertainty_margin(const Matrix& S, const SymplecticForm& J);

/// Robertson-Schroedinger check: S + (i/2) J >= -tol.
bool check_uncertainty(const Matrix& S, const SymplecticForm& J, double tol);

}  // namespace kickshape
