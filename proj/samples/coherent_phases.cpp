// SPDX-License-Identifier: Apache-2.0
//
// irs-hardening: channel hardening simulator for IRS-aided multi-antenna links
// Copyright (C) 2026 The irs-hardening authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Builds the reference 8 x 32 IRS, configures the co-phasing profile and shows
// that every element of the LoS cascade then adds up in phase.

#include "irs/array_geometry.hpp"
#include "irs/phase_capacity.hpp"

#include <iostream>
#include <numbers>

int main()
{
    constexpr double pi = std::numbers::pi;
    const irs::ArrayGeometry irs_array{8, 32, 1.0, 1.0, 2.0};
    const irs::Direction arrival{pi / 6, pi / 3};
    const irs::Direction departure{pi / 8, 2 * pi / 3};

    const auto phases = irs::optimal_phases(irs_array, arrival, departure);
    const auto coeffs = phases.reflection_coefficients();
    const auto a_in = irs::array_response(arrival, irs_array);
    const auto a_out = irs::array_response(departure, irs_array);

    std::complex<double> sum = 0.0;
    for (Eigen::Index n = 0; n < coeffs.size(); ++n)
        sum += coeffs(n) * a_in(n) * a_out(n);
    std::cout << "elements: " << irs_array.total() << "\ncoherent sum: " << sum << "\n";
}
