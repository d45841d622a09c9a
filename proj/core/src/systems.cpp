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


#include "kickshape/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kickshape/error.hpp"

namespace kickshape {

double Bounds::clamp(double p) const { return std::clamp(p, lower, upper); }

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::kValidity, std::string(what) + " must be positive and finite");
    }
}

void require_bounds(const Bounds& b) {
    if (!(b.lower < b.upper)) throw Error(ErrorCode::kValidity, "bounds need p_min < p_max");
    if (!(1.0 + b.lower > 0.0)) throw Error(ErrorCode::kValidity, "bounds need 1 + p_min > 0");
}

}  // namespace

void NemsParams::validate() const {
    require_positive(omega0, "Omega0");
    require_positive(gamma, "Gamma");
    require_positive(mass, "mass");
    require_positive(temperature, "temperature");
    require_positive(force_psd, "S_f");
    require_positive(measurement_psd, "S_m");
    require_bounds(bounds);
}

void ParticleParams::validate() const {
    require_positive(omega0, "Omega0");
    require_positive(gamma, "Gamma");
    require_positive(kappa0, "kappa0");
    if (!(eta_hom > 0.0 && eta_hom <= 1.0)) throw Error(ErrorCode::kValidity, "eta_hom must lie in (0, 1]");
    if (mass < 0.0) throw Error(ErrorCode::kValidity, "mass must not be negative");
    require_bounds(bounds);
}

double thermal_force_psd(double mass, double gamma, double temperature) {
    return 4.0 * constants::kBoltzmann * temperature * mass * gamma;
}

double zpf_position(double mass, double omega0) { return std::sqrt(constants::kHbar / (mass * omega0)); }

double zpf_momentum(double mass, double omega0) { return std::sqrt(constants::kHbar * mass * omega0); }

ParametricModel::ParametricModel(std::string name, Evaluator evaluator, Bounds bounds, double omega0,
                                 double gamma)
    : name_(std::move(name)),
      evaluator_(std::move(evaluator)),
      bounds_(bounds),
      omega0_(omega0),
      gamma_(gamma) {}

SystemMatrices ParametricModel::evaluate(double p) const {
    if (!std::isfinite(p) || !bounds_.contains(p)) {
        std::ostringstream os;
        os << "modulation " << p << " outside [" << bounds_.lower << ", " << bounds_.upper << "]";
        throw Error(ErrorCode::kAdmissibility, os.str());
    }
    return evaluator_(p);
}

double ParametricModel::reference_period() const { return 2.0 * std::numbers::pi / omega0_; }

ParametricModel nems_model(const NemsParams& params) {
    params.validate();
    const double w = params.omega0;
    const double g = params.gamma;
    const double q_zpf = zpf_position(params.mass, w);
    const double p_zpf = zpf_momentum(params.mass, w);
    const double c = q_zpf / std::sqrt(params.measurement_psd);
    const double q = params.force_psd / (p_zpf * p_zpf);

    ParametricModel model(
        "nems",
        [w, g, c, q](double p) {
            SystemMatrices m;
            m.A.resize(2, 2);
            m.A << 0.0, w, -w * (1.0 + p), -g;
            m.C.resize(1, 2);
            m.C << c, 0.0;
            m.Q = Matrix::Zero(2, 2);
            m.Q(1, 1) = q;
            m.N = Matrix::Zero(1, 2);
            m.eta = Matrix::Identity(1, 1);
            return m;
        },
        params.bounds, w, g);

    const double thermal = constants::kBoltzmann * params.temperature;
    const double quantum = constants::kHbar * w;
    if (thermal < 100.0 * quantum) {
        model.add_warning("k_B*Theta is not much larger than hbar*Omega0; the thermal noise model assumes the "
                          "high-temperature limit");
    }
    return model;
}

ParametricModel particle_model(const ParticleParams& params) {
    params.validate();
    const double w = params.omega0;
    const double g = params.gamma;
    const double kappa = params.kappa0;
    const double eta = params.eta_hom;

    return ParametricModel(
        "particle",
        [w, g, kappa, eta](double p) {
            if (!(1.0 + p > 0.0)) throw Error(ErrorCode::kAdmissibility, "laser power must stay positive");
            SystemMatrices m;
            m.A.resize(2, 2);
            m.A << 0.0, w, -w * std::sqrt(1.0 + p), -g;
            m.C.resize(1, 2);
            m.C << std::sqrt(8.0 * kappa * (1.0 + p)), 0.0;
            m.Q = Matrix::Zero(2, 2);
            m.Q(1, 1) = 2.0 * kappa * (1.0 + p);
            m.N = Matrix::Zero(1, 2);
            m.eta = Matrix::Constant(1, 1, eta);
            return m;
        },
        params.bounds, w, g);
}

}  // namespace kickshape
