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

#ifndef IRS_MONTE_CARLO_HPP
#define IRS_MONTE_CARLO_HPP

#include "irs/analytic_stats.hpp"
#include "irs/channel_model.hpp"
#include "irs/errors.hpp"
#include "irs/phase_capacity.hpp"
#include "irs/random.hpp"
#include "irs/running_stats.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace irs
{
    struct CampaignConfig
    {
        SystemParams system;
        ArrayGeometry tx_geometry;
        ArrayGeometry irs_geometry;
        std::optional<ScalingModel> scaling;
        std::size_t samples = 100000;
        std::uint64_t seed = 1;
        std::size_t workers = 1;
        std::size_t bins = 100;

        void validate() const
        {
            system.validate();
            tx_geometry.validate();
            irs_geometry.validate();
            if (scaling)
                scaling->validate();
            if (samples < 1)
                throw domain_error("CampaignConfig: samples must be >= 1");
            if (bins < 1)
                throw domain_error("CampaignConfig: bins must be >= 1");
        }

        friend bool operator==(const CampaignConfig &, const CampaignConfig &) = default;
    };

    struct Histogram
    {
        std::vector<double> edges; // bins + 1 entries
        std::vector<std::size_t> counts;

        [[nodiscard]] std::size_t bins() const noexcept { return counts.size(); }
    };

    // Equal-width bins over [min, max]; the last bin is closed.
    [[nodiscard]] inline Histogram histogram(std::span<const double> samples, std::size_t bins)
    {
        if (samples.empty())
            throw domain_error("histogram: no samples");
        if (bins < 1)
            throw domain_error("histogram: bins must be >= 1");
        const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
        const double lo = *lo_it, hi = *hi_it;

        Histogram h;
        if (hi == lo)
        {
            h.edges = {lo, hi};
            h.counts = {samples.size()};
            return h;
        }
        const double width = (hi - lo) / static_cast<double>(bins);
        h.edges.resize(bins + 1);
        for (std::size_t b = 0; b <= bins; ++b)
            h.edges[b] = lo + width * static_cast<double>(b);
        h.edges[bins] = hi;
        h.counts.assign(bins, 0);
        for (double x : samples)
        {
            auto b = static_cast<std::size_t>((x - lo) / width);
            ++h.counts[std::min(b, bins - 1)];
        }
        return h;
    }

    // Standard normal CDF
    [[nodiscard]] inline double normal_cdf(double z) noexcept
    {
        return 0.5 * std::erfc(-z / std::numbers::sqrt2);
    }

    // Kolmogorov-Smirnov distance between the empirical CDF of `sorted` and N(mu, sigma^2)
    [[nodiscard]] inline double ks_against_gaussian(std::span<const double> sorted, double mu, double sigma)
    {
        if (!(sigma > 0.0))
            throw domain_error("ks_against_gaussian: sigma must be positive");
        if (sorted.size() < 100)
            throw domain_error("ks_against_gaussian: need at least 100 samples");
        if (!std::is_sorted(sorted.begin(), sorted.end()))
            throw domain_error("ks_against_gaussian: samples must be sorted");

        const auto n = static_cast<double>(sorted.size());
        double d = 0.0;
        for (std::size_t i = 0; i < sorted.size(); ++i)
        {
            const double f = normal_cdf((sorted[i] - mu) / sigma);
            const double above = static_cast<double>(i + 1) / n - f;
            const double below = f - static_cast<double>(i) / n;
            d = std::max({d, above, below});
        }
        return d;
    }

    struct EmpiricalStats
    {
        double mean = 0.0;
        double variance = 0.0;
        Histogram histogram;
        std::optional<double> ks_distance; // empty when sigma_C = 0 or fewer than 100 samples
        std::size_t sample_count = 0;
        std::vector<double> samples; // capacities in realization order
    };

    // A campaign with its per-configuration state (covariance, LoS parts, phases) built once.
    class Campaign
    {
    public:
        // Realizations are grouped in fixed batches of consecutive indices; the layout
        // does not depend on the worker count, which keeps results bit-identical.
        static constexpr std::size_t batch_size = 256;

        explicit Campaign(CampaignConfig config)
            : config_(std::move(config))
        {
            config_.validate();
            cov_.emplace(build_sinc_covariance(config_.irs_geometry));
            los_ = build_los(config_.system, config_.tx_geometry, config_.irs_geometry);
            phases_ = optimal_phases(config_.irs_geometry, config_.system.aoa_irs, config_.system.aod_irs);
            analytic_ = analytic_capacity_stats(config_.system, config_.irs_geometry.total(),
                                                config_.tx_geometry.total(), *cov_, los_.h_bar_r);
        }

        [[nodiscard]] const CampaignConfig &config() const noexcept { return config_; }
        [[nodiscard]] const CovarianceMatrix &covariance() const noexcept { return *cov_; }
        [[nodiscard]] const LosComponents &los() const noexcept { return los_; }
        [[nodiscard]] const PhaseProfile &phases() const noexcept { return phases_; }
        [[nodiscard]] const CapacityStatistics &analytic() const noexcept { return analytic_; }

        [[nodiscard]] EmpiricalStats run() const
        {
            const std::size_t n = config_.samples;
            const std::size_t batches = (n + batch_size - 1) / batch_size;
            std::vector<double> capacities(n);
            std::vector<RunningStats<double>> partial(batches);

            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            auto work = [&] {
                try
                {
                    BatchWorkspace ws;
                    for (std::size_t b = next++; b < batches; b = next++)
                        partial[b] = run_batch(b, ws, capacities);
                }
                catch (...)
                {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            };

            const std::size_t workers = std::clamp<std::size_t>(config_.workers, 1, batches);
            if (workers == 1)
                work();
            else
            {
                std::vector<std::jthread> pool;
                pool.reserve(workers);
                for (std::size_t w = 0; w < workers; ++w)
                    pool.emplace_back(work);
            }
            if (failure)
                std::rethrow_exception(failure);

            RunningStats<double> total;
            for (const auto &p : partial)
                total.merge(p);

            EmpiricalStats out;
            out.mean = total.mean();
            out.variance = total.variance();
            out.sample_count = total.count();
            out.histogram = histogram(capacities, config_.bins);
            if (analytic_.sigma_C > 0.0 && n >= 100)
            {
                std::vector<double> sorted = capacities;
                std::sort(sorted.begin(), sorted.end());
                out.ks_distance = ks_against_gaussian(sorted, analytic_.mu_C, analytic_.sigma_C);
            }
            out.samples = std::move(capacities);
            return out;
        }

    private:
        struct BatchWorkspace
        {
            Eigen::MatrixXd white_re, white_im;   // N x B white draws
            Eigen::MatrixXd colored_re, colored_im; // N x B draws of h_tilde_r
            Eigen::MatrixXcd direct;              // M x B
        };

        RunningStats<double> run_batch(std::size_t b, BatchWorkspace &ws, std::vector<double> &capacities) const
        {
            const std::size_t first = b * batch_size;
            const std::size_t count = std::min(batch_size, config_.samples - first);
            const auto cols = static_cast<Eigen::Index>(count);
            const Eigen::Index n = cov_->dim();
            const auto m = static_cast<Eigen::Index>(config_.tx_geometry.total());
            const double direct_gain = std::sqrt(config_.system.alpha_d * config_.system.area_tx_element);

            ws.white_re.resize(n, cols);
            ws.white_im.resize(n, cols);
            ws.direct.resize(m, cols);
            // Per-realization draw order: h_d (M entries), then the white vector for h_tilde_r (N entries)
            for (Eigen::Index c = 0; c < cols; ++c)
            {
                Substream rng(config_.seed, first + static_cast<std::size_t>(c));
                for (Eigen::Index i = 0; i < m; ++i)
                    ws.direct(i, c) = direct_gain * rng.complex_normal();
                for (Eigen::Index i = 0; i < n; ++i)
                {
                    const auto g = rng.complex_normal();
                    ws.white_re(i, c) = g.real();
                    ws.white_im(i, c) = g.imag();
                }
            }
            ws.colored_re.noalias() = cov_->coloring() * ws.white_re;
            ws.colored_im.noalias() = cov_->coloring() * ws.white_im;

            const auto weights = rician_weights(config_.system);
            const Eigen::VectorXcd coefficients = phases_.reflection_coefficients();
            RunningStats<double> stats;
            Eigen::VectorXcd h_r(n);
            for (Eigen::Index c = 0; c < cols; ++c)
            {
                for (Eigen::Index i = 0; i < n; ++i)
                    h_r(i) = weights.los * los_.h_bar_r(i) +
                             weights.nlos * std::complex<double>(ws.colored_re(i, c), ws.colored_im(i, c));
                const Eigen::VectorXcd h = ws.direct.col(c) + cascade(los_.T, coefficients, h_r);
                const double cap = capacity(h, config_.system.rho);
                capacities[first + static_cast<std::size_t>(c)] = cap;
                stats.push(cap);
            }
            return stats;
        }

        CampaignConfig config_;
        std::optional<CovarianceMatrix> cov_;
        LosComponents los_;
        PhaseProfile phases_;
        CapacityStatistics analytic_;
    };

    [[nodiscard]] inline EmpiricalStats run_campaign(const CampaignConfig &config)
    {
        return Campaign(config).run();
    }

    enum class SweepMode
    {
        fixed_spacing,  // spacing and element area of the base config kept for every N
        fixed_aperture, // q = 1
        exponent        // A_N = A0 * N^-q with the configured q
    };

    struct SweepSpec
    {
        SweepMode mode = SweepMode::fixed_spacing;
        std::optional<ScalingModel> scaling; // exponent mode; optional A0 for fixed-aperture
    };

    struct SweepRecord
    {
        std::size_t n = 0;
        std::size_t nx = 0;
        std::size_t ny = 0;
        double spacing_x = 0.0;
        double spacing_y = 0.0;
        double q = 0.0;
        double lambda_max = 0.0;
        CapacityStatistics analytic;
        EmpiricalStats empirical;
    };

    [[nodiscard]] inline std::size_t exact_square_root(std::size_t n)
    {
        auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
        if (n == 0 || r * r != n)
            throw domain_error("sweep: N = " + std::to_string(n) + " is not a perfect square");
        return r;
    }

    // Scaling model a sweep point is generated from; fixed-spacing mode has none.
    [[nodiscard]] inline std::optional<ScalingModel> effective_scaling(const CampaignConfig &base, const SweepSpec &spec)
    {
        const double base_area = base.irs_geometry.dx * base.irs_geometry.dy;
        const auto base_n = static_cast<double>(base.irs_geometry.total());
        switch (spec.mode)
        {
        case SweepMode::fixed_spacing:
            return std::nullopt;
        case SweepMode::fixed_aperture:
            if (spec.scaling)
                return ScalingModel{spec.scaling->A0, 1.0};
            return ScalingModel{base_area * base_n, 1.0};
        case SweepMode::exponent:
            if (!spec.scaling)
                throw domain_error("sweep: exponent mode needs a scaling model");
            return *spec.scaling;
        }
        return std::nullopt;
    }

    // Campaign configuration for one sweep point (square IRS with sqrt(N) elements per side)
    [[nodiscard]] inline CampaignConfig sweep_point_config(const CampaignConfig &base, const SweepSpec &spec,
                                                           std::size_t n)
    {
        const std::size_t side = exact_square_root(n);
        CampaignConfig cfg = base;
        cfg.irs_geometry.nx = side;
        cfg.irs_geometry.ny = side;
        if (const auto scaling = effective_scaling(base, spec))
        {
            scaling->validate();
            const double d = scaling->spacing(static_cast<double>(n));
            cfg.irs_geometry.dx = d;
            cfg.irs_geometry.dy = d;
            cfg.system.area_irs_element = scaling->element_area(static_cast<double>(n));
            cfg.scaling = scaling;
        }
        else
            cfg.scaling.reset();
        return cfg;
    }

    [[nodiscard]] inline SweepRecord run_sweep_point(const CampaignConfig &cfg)
    {
        const Campaign campaign(cfg);
        SweepRecord rec;
        rec.n = cfg.irs_geometry.total();
        rec.nx = cfg.irs_geometry.nx;
        rec.ny = cfg.irs_geometry.ny;
        rec.spacing_x = cfg.irs_geometry.dx;
        rec.spacing_y = cfg.irs_geometry.dy;
        rec.q = cfg.scaling ? cfg.scaling->q : 0.0;
        rec.lambda_max = campaign.covariance().lambda_max();
        rec.analytic = campaign.analytic();
        rec.empirical = campaign.run();
        return rec;
    }

    [[nodiscard]] inline std::vector<SweepRecord> sweep_N(const CampaignConfig &base, std::span<const std::size_t> n_values,
                                                         const SweepSpec &spec)
    {
        std::vector<SweepRecord> out;
        // reject a bad grid before spending time on any point
        for (std::size_t n : n_values)
            (void)exact_square_root(n);
        for (std::size_t n : n_values)
            out.push_back(run_sweep_point(sweep_point_config(base, spec, n)));
        return out;
    }
}

#endif
