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


#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "kickshape/error.hpp"
#include "kickshape/gaussian_model.hpp"

namespace kickshape {
namespace {

TEST(Symplectic, SingleModeIsCanonical) {
    const SymplecticForm f = build_symplectic(1);
    Matrix expected(2, 2);
    expected << 0, 1, -1, 0;
    EXPECT_EQ(f.J, expected);
    EXPECT_EQ(f.dimension(), 2);
}

TEST(Symplectic, OrthogonalAndAntisymmetric) {
    for (int n = 1; n <= 4; ++n) {
        const Matrix J = build_symplectic(n).J;
        EXPECT_TRUE((J * J.transpose()).isIdentity(0.0)) << n;
        EXPECT_EQ(J.transpose(), -J) << n;
    }
}

TEST(Symplectic, RejectsZeroModes) {
    try {
        build_symplectic(0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kInvalidDimension);
    }
}

TEST(Collapse, MeasurementChannelReproducesParticleStructure) {
    const double kappa = 41e3;
    CollapseSet cs;
    cs.H = Matrix::Zero(2, 2);
    cs.c = Eigen::MatrixXcd::Zero(2, 1);
    cs.c(0, 0) = std::sqrt(2.0 * kappa);
    cs.eta = Vector::Constant(1, 0.4);
    const SystemMatrices m = matrices_from_collapse(cs);
    EXPECT_NEAR(m.C(0, 0), std::sqrt(8.0 * kappa), 1e-9);
    EXPECT_EQ(m.C(0, 1), 0.0);
    EXPECT_NEAR(m.Q(1, 1), 2.0 * kappa, 1e-9);
    EXPECT_EQ(m.Q(0, 0), 0.0);
    EXPECT_EQ(m.Q(0, 1), 0.0);
    EXPECT_TRUE(m.N.isZero(0.0));
    EXPECT_TRUE(m.A.isZero(0.0));
    EXPECT_EQ(m.eta(0, 0), 0.4);
}

TEST(Collapse, NullChannelGivesZeros) {
    CollapseSet cs;
    cs.H = Matrix::Zero(2, 2);
    cs.c = Eigen::MatrixXcd::Zero(2, 2);
    cs.eta = Vector::Ones(2);
    const SystemMatrices m = matrices_from_collapse(cs);
    EXPECT_TRUE(m.A.isZero(0.0));
    EXPECT_TRUE(m.C.isZero(0.0));
    EXPECT_TRUE(m.Q.isZero(0.0));
    EXPECT_TRUE(m.N.isZero(0.0));
}

TEST(Collapse, RealChannelsLeaveHamiltonianDrift) {
    CollapseSet cs;
    cs.H = Matrix(2, 2);
    cs.H << 2.0, 0.3, 0.3, 1.0;
    cs.c = Eigen::MatrixXcd(2, 2);
    cs.c << 0.7, -0.2, 1.1, 0.5;
    cs.eta = Vector::Constant(2, 1.0);
    const SystemMatrices m = matrices_from_collapse(cs);
    EXPECT_TRUE(m.N.isZero(0.0));
    EXPECT_TRUE(m.A.isApprox(build_symplectic(1).J * cs.H, 1e-15));
}

TEST(Collapse, ComplexChannelsGivePsdNoise) {
    CollapseSet cs;
    cs.H = Matrix::Identity(4, 4);
    cs.c = Eigen::MatrixXcd(4, 2);
    cs.c << std::complex<double>(0.3, 0.8), std::complex<double>(-1.0, 0.1),
        std::complex<double>(0.0, -0.4), std::complex<double>(0.2, 0.2),
        std::complex<double>(1.5, 0.0), std::complex<double>(0.0, 0.9),
        std::complex<double>(-0.6, 0.3), std::complex<double>(0.4, -0.7);
    cs.eta = Vector::Constant(2, 0.5);
    const SystemMatrices m = matrices_from_collapse(cs);
    EXPECT_TRUE(is_symmetric(m.Q, 0.0));
    EXPECT_GE(min_eigenvalue(m.Q), -1e-12);
    EXPECT_NO_THROW(m.validate());
    EXPECT_EQ(m.N.rows(), 2);
    EXPECT_EQ(m.N.cols(), 4);
}

TEST(Collapse, ShapeMismatchThrows) {
    CollapseSet cs;
    cs.H = Matrix::Zero(2, 2);
    cs.c = Eigen::MatrixXcd::Zero(4, 1);
    cs.eta = Vector::Ones(1);
    EXPECT_THROW(matrices_from_collapse(cs), Error);
}

TEST(Uncertainty, VacuumSaturates) {
    const SymplecticForm J = build_symplectic(1);
    const Matrix vac = 0.5 * Matrix::Identity(2, 2);
    EXPECT_NEAR(uncertainty_margin(vac, J), 0.0, 1e-15);
    EXPECT_TRUE(check_uncertainty(vac, J, 1e-12));
}

TEST(Uncertainty, SubVacuumViolates) {
    const SymplecticForm J = build_symplectic(1);
    const Matrix s = 0.1 * Matrix::Identity(2, 2);
    EXPECT_NEAR(uncertainty_margin(s, J), 0.1 - 0.5, 1e-14);
    EXPECT_FALSE(check_uncertainty(s, J, 1e-12));
}

TEST(Uncertainty, SqueezedMinimumStateSaturates) {
    // det S = 1/4 with S diagonal is a pure squeezed state: eigenvalues of
    // S + iJ/2 are 0 and trace(S).
    const SymplecticForm J = build_symplectic(1);
    Matrix s(2, 2);
    s << 0.05, 0.0, 0.0, 5.0;
    EXPECT_NEAR(uncertainty_margin(s, J), 0.0, 1e-14);
    EXPECT_TRUE(check_uncertainty(s, J, 1e-12));

    s(1, 1) = 4.0;
    const double expected = (4.05 - std::sqrt(3.95 * 3.95 + 1.0)) / 2.0;
    EXPECT_NEAR(uncertainty_margin(s, J), expected, 1e-14);
    EXPECT_LT(expected, 0.0);
    EXPECT_FALSE(check_uncertainty(s, J, 1e-12));
}

TEST(Uncertainty, MonotoneUnderAddedNoise) {
    const SymplecticForm J = build_symplectic(1);
    Matrix s(2, 2);
    s << 0.3, 0.1, 0.1, 0.9;
    bool previous = false;
    for (double eps = 0.0; eps < 1.0; eps += 0.05) {
        const bool ok = check_uncertainty(s + eps * Matrix::Identity(2, 2), J, 0.0);
        if (previous) EXPECT_TRUE(ok) << eps;
        previous = ok;
    }
    EXPECT_TRUE(previous);
}

TEST(Uncertainty, InvariantUnderSymplecticMaps) {
    const SymplecticForm J = build_symplectic(1);
    const Matrix states[] = {
        (Matrix(2, 2) << 0.5, 0.0, 0.0, 0.5).finished(),
        (Matrix(2, 2) << 0.2, 0.05, 0.05, 0.9).finished(),
        (Matrix(2, 2) << 2.0, -0.4, -0.4, 0.3).finished(),
    };
    for (const Matrix& s : states) {
        for (double th = 0.0; th < 3.0; th += 0.37) {
            Matrix R(2, 2);
            R << std::cos(th), std::sin(th), -std::sin(th), std::cos(th);
            const Matrix sq = (Vector(2) << 1.7, 1.0 / 1.7).finished().asDiagonal();
            const Matrix M = sq * R;
            ASSERT_TRUE((M * J.J * M.transpose()).isApprox(J.J, 1e-14));
            EXPECT_EQ(check_uncertainty(M * s * M.transpose(), J, 1e-12), check_uncertainty(s, J, 1e-12));
        }
    }
}

TEST(Uncertainty, RejectsAsymmetricCovariance) {
    Matrix s(2, 2);
    s << 1.0, 0.2, 0.0, 1.0;
    try {
        check_uncertainty(s, build_symplectic(1), 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kValidity);
    }
}

TEST(SystemMatrices, ValidateCatchesBadEfficiency) {
    SystemMatrices m;
    m.A = Matrix::Zero(2, 2);
    m.C = Matrix::Zero(1, 2);
    m.Q = Matrix::Zero(2, 2);
    m.N = Matrix::Zero(1, 2);
    m.eta = Matrix::Constant(1, 1, 1.5);
    EXPECT_THROW(m.validate(), Error);
    m.eta(0, 0) = 0.5;
    EXPECT_NO_THROW(m.validate());
    m.Q(0, 0) = -1.0;
    EXPECT_THROW(m.validate(), Error);
}

}  // namespace
}  // namespace kickshape
