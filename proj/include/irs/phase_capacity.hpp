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

#ifndef IRS_PHASE_CAPACITY_HPP
#define IRS_PHASE_CAPACITY_HPP

#include "irs/array_geometry.hpp"
#include "irs/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace irs
{
    // IRS phase shifts in radians, unwrapped
    struct PhaseProfile
    {
        Eigen::VectorXd beta;

        [[nodiscard]] Eigen::Index size() const noexcept { return beta.size(); }

        // exp(-j * beta_n) per element
        [[nodiscard]] Eigen::VectorXcd reflection_coefficients() const
        {
            Eigen::VectorXcd c(beta.size());
            for (Eigen::Index n = 0; n < beta.size(); ++n)
                c(n) = std::polar(1.0, -beta(n));
            return c;
        }
    };

    // Phases that co-phase the LoS cascade transmitter -> IRS -> receiver:
    // beta_n = 2*pi/lambda * (exponent_n(aoa_irs) + exponent_n(aod_irs))
    [[nodiscard]] inline PhaseProfile optimal_phases(const ArrayGeometry &irs, const Direction &aoa_irs,
                                                     const Direction &aod_irs)
    {
        irs.validate();
        const double wavenumber = 2.0 * std::numbers::pi / irs.wavelength;
        PhaseProfile p;
        p.beta.resize(static_cast<Eigen::Index>(irs.total()));
        for (std::size_t k = 1; k <= irs.total(); ++k)
            p.beta(static_cast<Eigen::Index>(k - 1)) =
                wavenumber * (exponent(k, aoa_irs, irs) + exponent(k, aod_irs, irs));
        return p;
    }

    // Cascaded IRS path for given reflection coefficients: T^T * diag(c) * h_r.
    // Note the plain transpose: h_m sums t_nm without conjugation.
    [[nodiscard]] inline Eigen::VectorXcd cascade(const Eigen::MatrixXcd &T, const Eigen::VectorXcd &coefficients,
                                                  const Eigen::VectorXcd &h_r)
    {
        return T.transpose() * coefficients.cwiseProduct(h_r);
    }

    // h = h_d + T^T * diag(exp(-j beta)) * h_r
    [[nodiscard]] inline Eigen::VectorXcd compose_end_to_end(const Eigen::VectorXcd &h_d, const Eigen::MatrixXcd &T,
                                                             const Eigen::VectorXcd &h_r, const PhaseProfile &phases)
    {
        if (T.cols() != h_d.size() || T.rows() != h_r.size() || phases.size() != h_r.size())
            throw domain_error("compose_end_to_end: dimension mismatch between h_d (M), T (N x M), h_r (N), beta (N)");
        return h_d + cascade(T, phases.reflection_coefficients(), h_r);
    }

    // MRT capacity in bits, log2(1 + rho * ||h||^2)
    [[nodiscard]] inline double capacity_from_gain(double channel_gain, double rho)
    {
        if (!(rho >= 0.0))
            throw domain_error("capacity: transmit power must be >= 0");
        return std::log2(1.0 + rho * channel_gain);
    }

    [[nodiscard]] inline double capacity(const Eigen::VectorXcd &h, double rho)
    {
        return capacity_from_gain(h.squaredNorm(), rho);
    }
}

#endif
