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

// Command-line front end: run a config file or a built-in preset.
//
//   irs_hardening run <config.json> [flags]
//   irs_hardening preset fig1|fig2 [flags]
//
// Exit codes: 0 success, 2 config error, 3 numerical error, 4 io error.

#include "irs/experiment.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace
{
    enum ExitCode : int
    {
        exit_ok = 0,
        exit_config = 2,
        exit_numerical = 3,
        exit_io = 4,
    };

    void print_summary(const irs::ExperimentSpec &spec, const irs::ExperimentResult &res, double seconds)
    {
        using irs::detail::format_double;
        for (const auto &r : res.records)
        {
            std::cout << "N=" << r.n << " (" << r.nx << "x" << r.ny << ")"
                      << "  lambda_max=" << format_double(r.lambda_max)
                      << "  mu_C=" << format_double(r.analytic.mu_C)
                      << "  var_C=" << format_double(r.analytic.sigma_C * r.analytic.sigma_C)
                      << "  mc_mean=" << format_double(r.empirical.mean)
                      << "  mc_var=" << format_double(r.empirical.variance);
            if (r.empirical.ks_distance)
                std::cout << "  ks=" << format_double(*r.empirical.ks_distance);
            std::cout << "\n";
        }
        if (res.eigen_conditions)
            std::cout << "u_hat=" << format_double(*res.eigen_conditions->u_hat)
                      << "  lambda_max/N decreasing=" << (res.eigen_conditions->lambda_ratio_decreasing ? "yes" : "no")
                      << "\n";
        if (res.fit_empirical)
            std::cout << "decay_slope (mc)=" << format_double(*res.fit_empirical->decay_slope)
                      << "  pass=" << (res.fit_empirical->decay_pass ? "yes" : "no") << "\n";
        for (const auto &w : res.warnings)
            std::cerr << "warning: " << w << "\n";
        for (const auto &f : res.files)
            std::cout << "wrote " << f.string() << "\n";
        std::cout << "samples=" << spec.config.samples << " seed=" << spec.config.seed
                  << " workers=" << spec.config.workers << " elapsed=" << format_double(seconds) << "s\n";
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Channel hardening simulator for IRS-aided multi-antenna links"};
    app.require_subcommand(1);

    irs::Overrides overrides;
    std::size_t samples = 0, workers = 0, bins = 0;
    std::uint64_t seed = 0;
    std::string output, format;
    bool dump_config = false;

    auto add_flags = [&](CLI::App *sub) {
        sub->add_option("--samples", samples, "Monte Carlo realizations per configuration");
        sub->add_option("--seed", seed, "64-bit seed");
        sub->add_option("--workers", workers, "worker threads (results do not depend on this)");
        sub->add_option("--output", output, "output directory");
        sub->add_option("--format", format, "records format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--bins", bins, "histogram bins");
        sub->add_flag("--dump-config", dump_config, "print the resolved configuration and exit");
    };

    std::string config_path;
    auto *run = app.add_subcommand("run", "run a JSON config (or regenerate from a previous output file)");
    run->add_option("config", config_path, "config file")->required();
    add_flags(run);

    std::string preset_name;
    auto *pre = app.add_subcommand("preset", "run a built-in preset");
    pre->add_option("name", preset_name, "preset name")->required()->check(CLI::IsMember({"fig1", "fig2"}));
    add_flags(pre);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    auto *active = run->parsed() ? run : pre;
    if (active->count("--samples"))
        overrides.samples = samples;
    if (active->count("--seed"))
        overrides.seed = seed;
    if (active->count("--workers"))
        overrides.workers = workers;
    if (active->count("--output"))
        overrides.output = output;
    if (active->count("--format"))
        overrides.format = irs::detail::parse_format(format);
    if (active->count("--bins"))
        overrides.bins = bins;

    try
    {
        irs::ExperimentSpec spec = run->parsed() ? irs::load_config_file(config_path) : irs::preset(preset_name);
        irs::apply_overrides(spec, overrides);
        if (dump_config)
        {
            std::cout << irs::emit_config(spec).dump(2) << "\n";
            return exit_ok;
        }
        const auto start = std::chrono::steady_clock::now();
        const auto res = irs::run_experiment(spec);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        print_summary(spec, res, seconds);
        return exit_ok;
    }
    catch (const irs::config_error &e)
    {
        std::cerr << "config-error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const irs::domain_error &e)
    {
        std::cerr << "config-error: " << e.what() << "\n";
        return exit_config;
    }
    catch (const irs::numerical_error &e)
    {
        std::cerr << "numerical-error: " << e.what() << "\n";
        return exit_numerical;
    }
    catch (const irs::io_error &e)
    {
        std::cerr << "io-error: " << e.what() << "\n";
        return exit_io;
    }
    catch (const std::exception &e)
    {
        std::cerr << "numerical-error: " << e.what() << "\n";
        return exit_numerical;
    }
}
