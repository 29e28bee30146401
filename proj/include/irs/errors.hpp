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

#ifndef IRS_ERRORS_HPP
#define IRS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace irs
{
    // Invalid argument to a model operation (index out of range, mismatched sizes, ...)
    class domain_error : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Numerical failure: eigen-solver breakdown, covariance violating the PSD model, ...
    class numerical_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Configuration rejected at parse or validation time
    class config_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class io_error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Fewer data points than a fit needs
    class insufficient_data_error : public domain_error
    {
    public:
        using domain_error::domain_error;
    };
}

#endif
