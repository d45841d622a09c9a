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

#include "kickshape/error.hpp"
#include "kickshape/linalg.hpp"

namespace kickshape {
namespace {

TEST(Lyapunov, DampedOscillatorEquipartition) {
    // For A = [[0, w], [-w, -g]] and Q = diag(0, q): X = q / (2 g) I.
    const double w = 3.0, g = 0.2, q = 0.7;
    Matrix A(2, 2);
    A << 0, w, -w, -g;
    Matrix Q = Matrix::Zero(2, 2);
    Q(1, 1) = q;
    const Matrix X = solve_lyapunov(A, Q);
    EXPECT_NEAR(X(0, 0), q / (2 * g), 1e-12);
    EXPECT_NEAR(X(1, 1), q / (2 * g), 1e-12);
    EXPECT_NEAR(X(0, 1), 0.0, 1e-12);
    EXPECT_LT((A * X + X * A.transpose() + Q).norm(), 1e-12);
}

TEST(Lyapunov, ScalarCase) {
    const Matrix X = solve_lyapunov(Matrix::Constant(1, 1, -2.0), Matrix::Constant(1, 1, 3.0));
    EXPECT_NEAR(X(0, 0), 0.75, 1e-15);
}

TEST(PsdSqrt, SquaresBack) {
    Matrix q(3, 3);
    q << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    const Matrix l = psd_sqrt(q);
    EXPECT_TRUE((l * l).isApprox(q, 1e-13));
    EXPECT_TRUE(is_symmetric(l, 1e-14));
}

TEST(PsdSqrt, RankDeficientNoise) {
    Matrix q = Matrix::Zero(2, 2);
    q(1, 1) = 9.0;
    const Matrix l = psd_sqrt(q);
    EXPECT_NEAR(l(1, 1), 3.0, 1e-15);
    EXPECT_NEAR(l(0, 0), 0.0, 1e-15);
}

TEST(PsdSqrt, NegativeDefiniteThrows) {
    try {
        psd_sqrt(Matrix::Constant(1, 1, -1.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kFactorization);
    }
}

TEST(Hurwitz, Classification) {
    Matrix a(2, 2);
    a << 0, 1, -1, -0.1;
    EXPECT_TRUE(is_hurwitz(a));
    a(1, 1) = 0.0;
    EXPECT_FALSE(is_hurwitz(a));
}

TEST(Symmetry, Tolerance) {
    Matrix m(2, 2);
    m << 1, 2, 2 + 1e-14, 1;
    EXPECT_TRUE(is_symmetric(m, 1e-12));
    EXPECT_FALSE(is_symmetric(m, 1e-16));
    EXPECT_TRUE(is_symmetric(symmetrized(m), 0.0));
}

}  // namespace
}  // namespace kickshape
