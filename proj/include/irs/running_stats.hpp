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

#ifndef IRS_RUNNING_STATS_HPP
#define IRS_RUNNING_STATS_HPP

#include <cstddef>
#include <limits>

namespace irs
{
    // Welford streaming mean/variance with Chan's pairwise merge.
    template <typename T = double>
    class RunningStats
    {
    public:
        constexpr void push(T x) noexcept
        {
            ++n_;
            const T delta = x - mean_;
            mean_ += delta / static_cast<T>(n_);
            m2_ += delta * (x - mean_);
        }

        constexpr void merge(const RunningStats &other) noexcept
        {
            if (other.n_ == 0)
                return;
            if (n_ == 0)
            {
                *this = other;
                return;
            }
            const T na = static_cast<T>(n_);
            const T nb = static_cast<T>(other.n_);
            const T total = na + nb;
            const T delta = other.mean_ - mean_;
            mean_ += delta * (nb / total);
            m2_ += other.m2_ + delta * delta * (na * nb / total);
            n_ += other.n_;
        }

        [[nodiscard]] constexpr std::size_t count() const noexcept { return n_; }
        [[nodiscard]] constexpr T mean() const noexcept { return n_ ? mean_ : std::numeric_limits<T>::quiet_NaN(); }

        // Unbiased (n - 1) estimator; 0 for a single sample
        [[nodiscard]] constexpr T variance() const noexcept
        {
            if (n_ == 0)
                return std::numeric_limits<T>::quiet_NaN();
            if (n_ == 1)
                return T(0);
            const T v = m2_ / static_cast<T>(n_ - 1);
            return v < T(0) ? T(0) : v;
        }

        [[nodiscard]] constexpr T sum_squared_deviations() const noexcept { return m2_; }

    private:
        std::size_t n_ = 0;
        T mean_ = 0;
        T m2_ = 0;
    };
}

#endif
