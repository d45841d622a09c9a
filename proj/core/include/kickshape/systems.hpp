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

#include <functional>
#include <string>
#include <vector>

#include "kickshape/gaussian_model.hpp"

namespace kickshape {

namespace constants {
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J / K
}  // namespace constants

/// Admissible interval of the scalar modulation parameter.
struct Bounds {
    double lower = -0.4;
    double upper = 0.4;

    bool contains(double p) const { return p >= lower && p <= upper; }
    double clamp(double p) const;
};

/// Nanomechanical resonator under frequency modulation, thermally driven and
/// read out interferometrically. Quadratures are zpf-scaled.
struct NemsParams {
    double omega0 = 0.0;        // rad/s
    double gamma = 0.0;         // 1/s
    double mass = 0.0;          // kg
    double temperature = 0.0;   // K
    double force_psd = 0.0;     // N^2/Hz
    double measurement_psd = 0.0;  // m^2/Hz
    Bounds bounds;

    void validate() const;
};

/// Optically levitated particle whose trapping power is modulated; power sets
/// frequency, measurement strength and recoil back-action together.
struct ParticleParams {
    double omega0 = 0.0;    // rad/s
    double gamma = 0.0;     // 1/s
    double kappa0 = 0.0;    // 1/s, measurement rate at p = 0
    double eta_hom = 1.0;   // homodyne efficiency
    double mass = 0.0;      // kg, informational only
    Bounds bounds;

    void validate() const;
};

/// Thermal force noise PSD 4 k_B Theta m Gamma (high-temperature limit).
double thermal_force_psd(double mass, double gamma, double temperature);
double zpf_position(double mass, double omega0);
double zpf_momentum(double mass, double omega0);

/// A map from a scalar modulation value p to system matrices.
class ParametricModel {
public:
    using Evaluator = std::function<SystemMatrices(double)>;

    ParametricModel(std::string name, Evaluator evaluator, Bounds bounds, double omega0, double gamma);

    /// Throws kAdmissibility when p lies outside the bounds.
    SystemMatrices evaluate(double p) const;

    const std::string& name() const { return name_; }
    const Bounds& bounds() const { return bounds_; }
    int modes() const { return 1; }
    double omega0() const { return omega0_; }
    double gamma() const { return gamma_; }
    double reference_period() const;

    /// Non-fatal remarks collected at construction (e.g. regime warnings).
    const std::vector<std::string>& warnings() const { return warnings_; }
    void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

private:
    std::string name_;
    Evaluator evaluator_;
    Bounds bounds_;
    double omega0_;
    double gamma_;
    std::vector<std::string> warnings_;
};

ParametricModel nems_model(const NemsParams& params);
ParametricModel particle_model(const ParticleParams& params);

}  // namespace kickshape
