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

#ifndef IRS_ANALYTIC_STATS_HPP
#define IRS_ANALYTIC_STATS_HPP

#include "irs/channel_model.hpp"
#include "irs/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace irs
{
    inline constexpr double log2_e = 1.0 / std::numbers::ln2;

    // Element area under growth of the IRS: A_N = A0 * N^-q, total area A0 * N^(1-q).
    // Square elements, so the spacing is sqrt(A_N) on both axes.
    struct ScalingModel
    {
        double A0 = 1.0;
        double q = 0.0;

        void validate() const
        {
            if (!(A0 > 0.0) || !std::isfinite(A0))
                throw domain_error("ScalingModel: A0 must be positive");
            if (!(q >= 0.0 && q <= 1.0))
                throw domain_error("ScalingModel: q must lie in [0, 1]");
        }

        [[nodiscard]] double element_area(double n) const { return A0 * std::pow(n, -q); }
        [[nodiscard]] double total_area(double n) const { return A0 * std::pow(n, 1.0 - q); }
        [[nodiscard]] double spacing(double n) const { return std::sqrt(A0) * std::pow(n, -q / 2.0); }

        friend bool operator==(const ScalingModel &, const ScalingModel &) = default;
    };

    struct CapacityStatistics
    {
        double mu_C = 0.0;    // mean capacity, bits
        double sigma_C = 0.0; // standard deviation, bits
        double mu = 0.0;
        double eta = 0.0;
        double omega = 0.0;
        double alpha_bar_N = 0.0;
        double quadratic_form = 0.0; // h_bar^H R h_bar
    };

    // alpha_bar_N = alpha_r * alpha_s * A_N^2 / (1 + kappa_r)
    [[nodiscard]] inline double alpha_bar(const SystemParams &params, double area_irs_element)
    {
        if (!(params.kappa_r >= 0.0))
            throw domain_error("alpha_bar: kappa_r must be >= 0");
        return params.alpha_r * params.alpha_s * area_irs_element * area_irs_element / (1.0 + params.kappa_r);
    }

    struct Moments
    {
        double mu;
        double eta;
        double omega;
        double alpha_bar_N;
        double quadratic_form;
    };

    // Real quadratic form x^H R x for real symmetric R
    [[nodiscard]] inline double hermitian_quadratic_form(const Eigen::MatrixXd &r, const Eigen::VectorXcd &x)
    {
        const std::complex<double> value = x.dot(r.cast<std::complex<double>>() * x); // dot conjugates x
        const double tol = 1e-9 * std::max(1.0, std::abs(value.real()));
        if (std::abs(value.imag()) > tol)
            throw numerical_error("quadratic form h^H R h is not real (imaginary part " +
                                  std::to_string(value.imag()) + ")");
        return value.real();
    }

    [[nodiscard]] inline Moments analytic_moments(const SystemParams &params, std::size_t n, std::size_t m,
                                                  const CovarianceMatrix &cov, const Eigen::VectorXcd &h_bar_r)
    {
        if (cov.dim() != static_cast<Eigen::Index>(n) || h_bar_r.size() != cov.dim())
            throw domain_error("analytic_moments: covariance / LoS dimension does not match N");
        if (m < 1)
            throw domain_error("analytic_moments: M must be >= 1");

        const double abar = alpha_bar(params, params.area_irs_element);
        const double qf = hermitian_quadratic_form(cov.entries(), h_bar_r);
        const double direct = params.alpha_d * params.area_tx_element;
        const double los = params.kappa_r * abar * static_cast<double>(n) * static_cast<double>(n);
        const double md = static_cast<double>(m);

        return {direct + los + abar * qf, direct / md + abar * qf, 2.0 * los + abar * qf, abar, qf};
    }

    [[nodiscard]] inline CapacityStatistics analytic_capacity_stats(const SystemParams &params, std::size_t n,
                                                                    std::size_t m, const CovarianceMatrix &cov,
                                                                    const Eigen::VectorXcd &h_bar_r)
    {
        const Moments mo = analytic_moments(params, n, m, cov, h_bar_r);
        const double md = static_cast<double>(m);
        const double direct = params.alpha_d * params.area_tx_element;
        const double snr = params.rho * md * mo.mu;

        CapacityStatistics s;
        s.mu = mo.mu;
        s.eta = mo.eta;
        s.omega = mo.omega;
        s.alpha_bar_N = mo.alpha_bar_N;
        s.quadratic_form = mo.quadratic_form;
        s.mu_C = std::log2(1.0 + snr);
        s.sigma_C = params.rho * md * log2_e / (1.0 + snr) *
                    std::sqrt(mo.omega * mo.eta + mo.eta + (md - 1.0) / md * direct);
        return s;
    }

    // Ordinary least squares of log(y) on log(x), all points equally weighted.
    struct PowerLawFit
    {
        double exponent = 0.0;  // slope in log-log
        double log_scale = 0.0; // intercept, y ~ exp(log_scale) * x^exponent
        double r2 = 0.0;
        std::vector<double> residuals; // log(y) - fitted
    };

    [[nodiscard]] inline PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y)
    {
        if (x.size() != y.size())
            throw domain_error("fit_power_law: size mismatch");
        if (x.size() < 2)
            throw insufficient_data_error("fit_power_law: need at least 2 points");

        const auto k = static_cast<double>(x.size());
        double sx = 0, sy = 0;
        std::vector<double> lx(x.size()), ly(y.size());
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            if (!(x[i] > 0.0) || !(y[i] > 0.0))
                throw domain_error("fit_power_law: values must be positive");
            lx[i] = std::log(x[i]);
            ly[i] = std::log(y[i]);
            sx += lx[i];
            sy += ly[i];
        }
        const double mx = sx / k, my = sy / k;
        double sxx = 0, sxy = 0, syy = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
            syy += (ly[i] - my) * (ly[i] - my);
        }
        if (sxx == 0.0)
            throw domain_error("fit_power_law: abscissae must not all coincide");

        PowerLawFit fit;
        fit.exponent = sxy / sxx;
        fit.log_scale = my - fit.exponent * mx;
        double ss_res = 0;
        fit.residuals.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            fit.residuals[i] = ly[i] - (fit.log_scale + fit.exponent * lx[i]);
            ss_res += fit.residuals[i] * fit.residuals[i];
        }
        fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
        return fit;
    }

    // Diagnostics for the eigenvalue growth conditions and the hardening trend.
    // Fields not produced by a given check stay empty.
    struct HardeningDiagnostics
    {
        // check_eigen_conditions
        std::optional<double> u_hat;
        std::optional<double> u_r2;
        std::vector<double> u_residuals;
        bool lambda_ratio_decreasing = false;     // lambda_max / N decreasing in N
        bool inverse_area_gain_decreasing = false; // 1 / (lambda_max * A_IRS) decreasing in N

        // hardening_fit
        std::optional<double> decay_slope;
        std::optional<double> decay_r2;
        std::vector<double> decay_residuals;
        std::optional<double> b_hat;
        std::optional<double> c_hat;
        bool decay_pass = false;

        std::optional<double> far_field_margin;
    };

    struct EigenPoint
    {
        double n;
        double lambda_max;
    };

    [[nodiscard]] inline HardeningDiagnostics check_eigen_conditions(std::span<const EigenPoint> sequence,
                                                                     const ScalingModel &scaling)
    {
        if (sequence.size() < 4)
            throw insufficient_data_error("check_eigen_conditions: need at least 4 values of N");
        for (std::size_t i = 1; i < sequence.size(); ++i)
            if (!(sequence[i].n > sequence[i - 1].n))
                throw domain_error("check_eigen_conditions: N must be strictly increasing");

        std::vector<double> ns, lm;
        for (const auto &p : sequence)
        {
            ns.push_back(p.n);
            lm.push_back(p.lambda_max);
        }
        const auto fit = fit_power_law(ns, lm);

        HardeningDiagnostics d;
        d.u_hat = fit.exponent;
        d.u_r2 = fit.r2;
        d.u_residuals = fit.residuals;
        d.lambda_ratio_decreasing = true;
        d.inverse_area_gain_decreasing = true;
        for (std::size_t i = 1; i < sequence.size(); ++i)
        {
            if (!(lm[i] / ns[i] < lm[i - 1] / ns[i - 1]))
                d.lambda_ratio_decreasing = false;
            const double cur = 1.0 / (lm[i] * scaling.total_area(ns[i]));
            const double prev = 1.0 / (lm[i - 1] * scaling.total_area(ns[i - 1]));
            if (!(cur < prev))
                d.inverse_area_gain_decreasing = false;
        }
        return d;
    }

    struct SweepPoint
    {
        double n;
        double variance;                                            // sigma_C^2
        double mean = std::numeric_limits<double>::quiet_NaN(); // mu_C, optional
    };

    // Slack on the fitted variance decay slope relative to the bound exponent u - 1
    inline constexpr double decay_slope_slack = 0.1;

    [[nodiscard]] inline HardeningDiagnostics hardening_fit(std::span<const SweepPoint> sweep, double u_hat, double q)
    {
        if (sweep.size() < 4)
            throw insufficient_data_error("hardening_fit: need at least 4 sweep points");
        std::vector<double> ns, vs;
        for (const auto &p : sweep)
        {
            if (!(p.variance > 0.0))
                throw domain_error("hardening_fit: variances must be positive");
            ns.push_back(p.n);
            vs.push_back(p.variance);
        }
        const auto fit = fit_power_law(ns, vs);

        HardeningDiagnostics d;
        d.u_hat = u_hat;
        d.decay_slope = fit.exponent;
        d.decay_r2 = fit.r2;
        d.decay_residuals = fit.residuals;
        d.decay_pass = fit.exponent <= (u_hat - 1.0) + decay_slope_slack;

        double c = 0.0;
        double b = std::numeric_limits<double>::infinity();
        bool have_means = true;
        for (const auto &p : sweep)
        {
            c = std::max(c, p.variance / std::pow(p.n, u_hat - 1.0));
            if (std::isnan(p.mean))
                have_means = false;
            else
                b = std::min(b, p.mean - (1.0 - q) * std::log2(p.n));
        }
        d.c_hat = c;
        if (have_means)
            d.b_hat = b;
        return d;
    }

    struct FarFieldResult
    {
        double margin;  // distance / (D0 * N^(gamma/2))
        bool violated;  // margin < 1: far-field assumption questionable
    };

    [[nodiscard]] inline FarFieldResult far_field_check(double distance, double n, double d0, double gamma, double q)
    {
        if (!(d0 > 0.0))
            throw config_error("far_field_check: D0 must be positive");
        if (!(gamma > 1.0 - q))
            throw config_error("far_field_check: gamma must exceed 1 - q");
        const double margin = distance / (d0 * std::pow(n, gamma / 2.0));
        return {margin, margin < 1.0};
    }
}

#endif
