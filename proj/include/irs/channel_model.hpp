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

#ifndef IRS_CHANNEL_MODEL_HPP
#define IRS_CHANNEL_MODEL_HPP

#include "irs/array_geometry.hpp"
#include "irs/errors.hpp"
#include "irs/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace irs
{
    // Large-scale parameters of the IRS-aided link.
    //
    // The AWGN at the receiver has unit variance; rho is the transmit SNR.
    struct SystemParams
    {
        double alpha_d = 1.0;          // direct-path loss
        double alpha_s = 1.0;          // transmitter -> IRS loss
        double alpha_r = 1.0;          // IRS -> receiver loss
        double kappa_r = 1.0;          // Rician factor of the IRS -> receiver link
        double rho = 1.0;              // transmit power
        double area_tx_element = 1.0;  // A_M
        double area_irs_element = 1.0; // A_N
        Direction aoa_irs;             // arrival at the IRS from the transmitter
        Direction aod_irs;             // departure from the IRS towards the receiver
        Direction aod_tx;              // departure from the transmitter towards the IRS

        static constexpr double noise_variance = 1.0;

        void validate() const
        {
            auto check = [](double v, const char *name) {
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw domain_error(std::string("SystemParams: ") + name + " must be finite and >= 0");
            };
            check(alpha_d, "alpha_d");
            check(alpha_s, "alpha_s");
            check(alpha_r, "alpha_r");
            check(rho, "rho");
            check(area_tx_element, "area_tx_element");
            check(area_irs_element, "area_irs_element");
            if (!(kappa_r >= 0.0) || std::isnan(kappa_r))
                throw domain_error("SystemParams: kappa_r must be >= 0");
        }

        friend bool operator==(const SystemParams &, const SystemParams &) = default;
    };

    // Rician factors at or above this value are treated as a pure LoS link
    inline constexpr double kappa_los_limit = 1e12;

    // Real symmetric IRS correlation matrix with its (repaired) eigendecomposition.
    class CovarianceMatrix
    {
    public:
        // Relative tolerance on negative eigenvalues before the model is considered violated
        static constexpr double negative_eigenvalue_tolerance = 1e-8;

        // Validates unit diagonal and symmetry, decomposes, clips rounding-level negative eigenvalues to 0.
        static CovarianceMatrix from_matrix(Eigen::MatrixXd entries)
        {
            const Eigen::Index n = entries.rows();
            if (n == 0 || entries.cols() != n)
                throw domain_error("CovarianceMatrix: matrix must be square and non-empty");
            for (Eigen::Index i = 0; i < n; ++i)
            {
                if (entries(i, i) != 1.0)
                    throw domain_error("CovarianceMatrix: diagonal entries must equal 1");
                for (Eigen::Index j = 0; j < i; ++j)
                    if (entries(i, j) != entries(j, i))
                        throw domain_error("CovarianceMatrix: matrix is not symmetric");
            }

            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries);
            if (solver.info() != Eigen::Success)
                throw numerical_error("CovarianceMatrix: eigendecomposition failed");

            CovarianceMatrix cov;
            // Eigen returns ascending order; store descending
            cov.eigenvalues_ = solver.eigenvalues().reverse();
            cov.eigenvectors_ = solver.eigenvectors().rowwise().reverse();
            cov.lambda_max_ = cov.eigenvalues_(0);
            cov.min_raw_eigenvalue_ = cov.eigenvalues_(n - 1);

            if (cov.min_raw_eigenvalue_ < -negative_eigenvalue_tolerance * cov.lambda_max_)
                throw numerical_error("CovarianceMatrix: eigenvalue " + std::to_string(cov.min_raw_eigenvalue_) +
                                      " violates positive semidefiniteness");
            for (Eigen::Index i = 0; i < n; ++i)
            {
                if (cov.eigenvalues_(i) < 0.0)
                {
                    cov.eigenvalues_(i) = 0.0;
                    ++cov.clipped_count_;
                }
            }
            cov.trace_deviation_ = cov.eigenvalues_.sum() - static_cast<double>(n);
            cov.coloring_ = cov.eigenvectors_ * cov.eigenvalues_.cwiseSqrt().asDiagonal();
            cov.entries_ = std::move(entries);
            return cov;
        }

        [[nodiscard]] Eigen::Index dim() const noexcept { return entries_.rows(); }
        [[nodiscard]] const Eigen::MatrixXd &entries() const noexcept { return entries_; }
        [[nodiscard]] const Eigen::VectorXd &eigenvalues() const noexcept { return eigenvalues_; }
        [[nodiscard]] const Eigen::MatrixXd &eigenvectors() const noexcept { return eigenvectors_; }
        [[nodiscard]] double lambda_max() const noexcept { return lambda_max_; }
        [[nodiscard]] double lambda_min() const noexcept { return eigenvalues_(dim() - 1); }

        // V * diag(sqrt(eigenvalues)); maps white CN(0, I) to CN(0, R)
        [[nodiscard]] const Eigen::MatrixXd &coloring() const noexcept { return coloring_; }

        // Repair diagnostics
        [[nodiscard]] double min_raw_eigenvalue() const noexcept { return min_raw_eigenvalue_; }
        [[nodiscard]] Eigen::Index clipped_count() const noexcept { return clipped_count_; }
        [[nodiscard]] double trace_deviation() const noexcept { return trace_deviation_; }

    private:
        CovarianceMatrix() = default;

        Eigen::MatrixXd entries_;
        Eigen::VectorXd eigenvalues_;
        Eigen::MatrixXd eigenvectors_;
        Eigen::MatrixXd coloring_;
        double lambda_max_ = 0.0;
        double min_raw_eigenvalue_ = 0.0;
        Eigen::Index clipped_count_ = 0;
        double trace_deviation_ = 0.0;
    };

    // Normalized sinc, sin(pi x) / (pi x)
    [[nodiscard]] inline double sinc(double x) noexcept
    {
        if (x == 0.0)
            return 1.0;
        const double px = std::numbers::pi * x;
        return std::sin(px) / px;
    }

    // Isotropic-scattering correlation: R(n, n') = sinc(2 * distance(n, n') / lambda)
    [[nodiscard]] inline CovarianceMatrix build_sinc_covariance(const ArrayGeometry &irs)
    {
        irs.validate();
        const auto n = static_cast<Eigen::Index>(irs.total());
        Eigen::MatrixXd r(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
        {
            r(a, a) = 1.0;
            const auto pa = index_maps(static_cast<std::size_t>(a) + 1, irs);
            for (Eigen::Index b = 0; b < a; ++b)
            {
                const auto pb = index_maps(static_cast<std::size_t>(b) + 1, irs);
                const double ddx = irs.dx * (static_cast<double>(pa.i) - static_cast<double>(pb.i));
                const double ddy = irs.dy * (static_cast<double>(pa.j) - static_cast<double>(pb.j));
                const double v = sinc(2.0 / irs.wavelength * std::sqrt(ddx * ddx + ddy * ddy));
                r(a, b) = v;
                r(b, a) = v;
            }
        }
        return CovarianceMatrix::from_matrix(std::move(r));
    }

    // Rank-one LoS transmitter -> IRS matrix, N x M:
    // T = sqrt(alpha_s * A_N) * a_N(aoa_irs) * a_M(aod_tx)^H
    [[nodiscard]] inline Eigen::MatrixXcd build_los_T(const SystemParams &params, const ArrayGeometry &tx,
                                                      const ArrayGeometry &irs)
    {
        const double gain = std::sqrt(params.alpha_s * params.area_irs_element);
        return gain * array_response(params.aoa_irs, irs) * array_response(params.aod_tx, tx).adjoint();
    }

    // LoS part of the IRS -> receiver link
    [[nodiscard]] inline Eigen::VectorXcd build_los_h_bar(const ArrayGeometry &irs, const Direction &aod_irs)
    {
        return array_response(aod_irs, irs);
    }

    // Rayleigh direct channel, entries sqrt(alpha_d * A_M) * CN(0, 1)
    [[nodiscard]] inline Eigen::VectorXcd sample_direct(const SystemParams &params, const ArrayGeometry &tx,
                                                        Substream &rng)
    {
        const double gain = std::sqrt(params.alpha_d * params.area_tx_element);
        return gain * complex_normal_vector(static_cast<Eigen::Index>(tx.total()), rng);
    }

    // Rician mixing weights (LoS, NLoS) of the IRS -> receiver link, including sqrt(alpha_r * A_N)
    struct RicianWeights
    {
        double los;
        double nlos;
    };

    [[nodiscard]] inline RicianWeights rician_weights(const SystemParams &params) noexcept
    {
        const double gain = std::sqrt(params.alpha_r * params.area_irs_element);
        if (params.kappa_r >= kappa_los_limit)
            return {gain, 0.0};
        return {gain * std::sqrt(params.kappa_r / (params.kappa_r + 1.0)),
                gain * std::sqrt(1.0 / (params.kappa_r + 1.0))};
    }

    struct ReflectDraw
    {
        Eigen::VectorXcd h_tilde_r; // NLoS draw, covariance R
        Eigen::VectorXcd h_r;       // full IRS -> receiver channel
    };

    [[nodiscard]] inline ReflectDraw sample_reflect(const SystemParams &params, const CovarianceMatrix &cov,
                                                    const Eigen::VectorXcd &h_bar_r, Substream &rng)
    {
        if (h_bar_r.size() != cov.dim())
            throw domain_error("sample_reflect: LoS vector length does not match covariance dimension");
        const Eigen::VectorXcd g = complex_normal_vector(cov.dim(), rng);
        ReflectDraw out;
        out.h_tilde_r = cov.coloring() * g;
        const auto w = rician_weights(params);
        out.h_r = w.los * h_bar_r + w.nlos * out.h_tilde_r;
        return out;
    }

    // One draw of all link components. `h` is filled in by compose_end_to_end.
    struct ChannelRealization
    {
        Eigen::VectorXcd h_d;
        Eigen::MatrixXcd T;
        Eigen::VectorXcd h_bar_r;
        Eigen::VectorXcd h_tilde_r;
        Eigen::VectorXcd h_r;
        Eigen::VectorXcd h;
    };

    // Deterministic per-configuration parts of the channel
    struct LosComponents
    {
        Eigen::MatrixXcd T;
        Eigen::VectorXcd h_bar_r;
    };

    [[nodiscard]] inline LosComponents build_los(const SystemParams &params, const ArrayGeometry &tx,
                                                 const ArrayGeometry &irs)
    {
        return {build_los_T(params, tx, irs), build_los_h_bar(irs, params.aod_irs)};
    }

    // Draws h_d then h_tilde_r from the same substream, in that order.
    [[nodiscard]] inline ChannelRealization sample_channel(const SystemParams &params, const ArrayGeometry &tx,
                                                           const CovarianceMatrix &cov, const LosComponents &los,
                                                           Substream &rng)
    {
        ChannelRealization out;
        out.h_d = sample_direct(params, tx, rng);
        auto reflect = sample_reflect(params, cov, los.h_bar_r, rng);
        out.T = los.T;
        out.h_bar_r = los.h_bar_r;
        out.h_tilde_r = std::move(reflect.h_tilde_r);
        out.h_r = std::move(reflect.h_r);
        return out;
    }
}

#endif
