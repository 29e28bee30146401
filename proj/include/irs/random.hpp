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

#ifndef IRS_RANDOM_HPP
#define IRS_RANDOM_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <complex>
#include <cstdint>
#include <random>

namespace irs
{
    // Deterministic random substream for one realization.
    //
    // The engine state is a pure function of (seed, stream index), so any
    // partition of realizations over workers draws exactly the same numbers.
    class Substream
    {
    public:
        Substream(std::uint64_t seed, std::uint64_t stream)
        {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
            engine_.seed(seq);
        }

        // Circularly-symmetric CN(0, 1): real and imaginary parts each N(0, 1/2).
        std::complex<double> complex_normal()
        {
            const double re = normal_(engine_);
            const double im = normal_(engine_);
            return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
        }

        double normal() { return normal_(engine_); }

        std::mt19937_64 &engine() noexcept { return engine_; }

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };

    // Vector of i.i.d. CN(0, 1) entries
    inline Eigen::VectorXcd complex_normal_vector(Eigen::Index n, Substream &rng)
    {
        Eigen::VectorXcd g(n);
        for (Eigen::Index i = 0; i < n; ++i)
            g(i) = rng.complex_normal();
        return g;
    }
}

#endif
