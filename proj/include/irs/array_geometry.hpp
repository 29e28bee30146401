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

#ifndef IRS_ARRAY_GEOMETRY_HPP
#define IRS_ARRAY_GEOMETRY_HPP

#include "irs/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>

namespace irs
{
    // Rectangular uniform planar array. Lengths in meters.
    //
    // Elements are numbered 1..total() on the public API, row by row:
    // element k sits at column (k-1) mod nx and row floor((k-1)/nx).
    struct ArrayGeometry
    {
        std::size_t nx = 1;     // horizontal element count
        std::size_t ny = 1;     // vertical element count
        double dx = 0.5;        // horizontal spacing
        double dy = 0.5;        // vertical spacing
        double wavelength = 1.0;

        [[nodiscard]] constexpr std::size_t total() const noexcept { return nx * ny; }
        [[nodiscard]] constexpr double element_area() const noexcept { return dx * dy; }

        // Sub-half-wavelength spacing is assumed by the model; larger spacing is legal but suspect.
        [[nodiscard]] bool spacing_within_half_wavelength() const noexcept
        {
            const double half = 0.5 * wavelength * (1.0 + 1e-12);
            return dx <= half && dy <= half;
        }

        void validate() const
        {
            if (nx < 1 || ny < 1)
                throw domain_error("ArrayGeometry: element counts must be >= 1");
            if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy))
                throw domain_error("ArrayGeometry: spacings must be positive and finite");
            if (!(wavelength > 0.0) || !std::isfinite(wavelength))
                throw domain_error("ArrayGeometry: wavelength must be positive and finite");
        }

        friend bool operator==(const ArrayGeometry &, const ArrayGeometry &) = default;
    };

    // Plane-wave direction in radians.
    struct Direction
    {
        double azimuth = 0.0;
        double elevation = 0.0;

        friend bool operator==(const Direction &, const Direction &) = default;
    };

    struct ElementPosition
    {
        std::size_t i; // horizontal index, 0..nx-1
        std::size_t j; // vertical index, 0..ny-1

        friend bool operator==(const ElementPosition &, const ElementPosition &) = default;
    };

    // 1-based element index -> (i, j) grid position
    [[nodiscard]] inline ElementPosition index_maps(std::size_t k, const ArrayGeometry &geometry)
    {
        if (k < 1 || k > geometry.total())
            throw domain_error("index_maps: element index " + std::to_string(k) + " outside [1, " +
                               std::to_string(geometry.total()) + "]");
        return {(k - 1) % geometry.nx, (k - 1) / geometry.nx};
    }

    // Path-length offset (meters) of element k for a plane wave from `dir`.
    // Wavelength-agnostic: the 2*pi/lambda factor is applied by array_response.
    [[nodiscard]] inline double exponent(std::size_t k, const Direction &dir, const ArrayGeometry &geometry)
    {
        const auto [i, j] = index_maps(k, geometry);
        return static_cast<double>(i) * geometry.dx * std::cos(dir.elevation) * std::sin(dir.azimuth) +
               static_cast<double>(j) * geometry.dy * std::sin(dir.elevation);
    }

    // Unit-modulus steering vector; entry k-1 is exp(j * 2*pi/lambda * exponent(k, dir)).
    [[nodiscard]] inline Eigen::VectorXcd array_response(const Direction &dir, const ArrayGeometry &geometry)
    {
        geometry.validate();
        const double wavenumber = 2.0 * std::numbers::pi / geometry.wavelength;
        Eigen::VectorXcd a(static_cast<Eigen::Index>(geometry.total()));
        for (std::size_t k = 1; k <= geometry.total(); ++k)
            a(static_cast<Eigen::Index>(k - 1)) = std::polar(1.0, wavenumber * exponent(k, dir, geometry));
        return a;
    }
}

#endif
