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

#ifndef IRS_EXPERIMENT_HPP
#define IRS_EXPERIMENT_HPP

#include "irs/analytic_stats.hpp"
#include "irs/errors.hpp"
#include "irs/monte_carlo.hpp"
#include "irs/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

namespace irs
{
    using json = nlohmann::ordered_json;

    enum class ExperimentKind
    {
        density, // one configuration, histogram against the Gaussian approximation
        sweep,   // N-sweep with hardening diagnostics
        single   // one configuration, records only
    };

    enum class OutputFormat
    {
        csv,
        json
    };

    struct OutputSpec
    {
        std::string path = "irs_out";
        OutputFormat format = OutputFormat::csv;

        friend bool operator==(const OutputSpec &, const OutputSpec &) = default;
    };

    struct FarFieldSpec
    {
        double distance = 0.0;
        double D0 = 1.0;
        double gamma = 1.0;

        friend bool operator==(const FarFieldSpec &, const FarFieldSpec &) = default;
    };

    struct ExperimentSpec
    {
        ExperimentKind kind = ExperimentKind::single;
        CampaignConfig config;
        std::vector<std::size_t> sweep_n;
        SweepSpec sweep;
        OutputSpec output;
        bool emit_histogram = false;
        bool emit_analytic_overlay = false;
        std::optional<FarFieldSpec> far_field;

        friend bool operator==(const ExperimentSpec &a, const ExperimentSpec &b)
        {
            return a.kind == b.kind && a.config == b.config && a.sweep_n == b.sweep_n && a.sweep.mode == b.sweep.mode &&
                   a.sweep.scaling == b.sweep.scaling && a.output == b.output &&
                   a.emit_histogram == b.emit_histogram && a.emit_analytic_overlay == b.emit_analytic_overlay &&
                   a.far_field == b.far_field;
        }
    };

    // Command-line overrides; applied on top of file or preset values
    struct Overrides
    {
        std::optional<std::size_t> samples;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> workers;
        std::optional<std::string> output;
        std::optional<OutputFormat> format;
        std::optional<std::size_t> bins;
    };

    namespace detail
    {
        // Locale-independent shortest-exact formatting at 17 significant digits
        inline std::string format_double(double v)
        {
            char buf[64];
            const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
            return std::string(buf, res.ptr);
        }

        inline std::string_view trim(std::string_view s)
        {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.remove_prefix(1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.remove_suffix(1);
            return s;
        }

        inline std::optional<double> parse_number(std::string_view s)
        {
            s = trim(s);
            if (!s.empty() && s.front() == '+')
                s.remove_prefix(1);
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                return std::nullopt;
            return v;
        }

        // "<value> deg" or "<value> rad"
        inline double parse_angle(const json &j, const std::string &name)
        {
            if (!j.is_string())
                throw config_error(name + ": angle must carry a unit suffix (e.g. \"30 deg\" or \"0.5 rad\")");
            const std::string text = j.get<std::string>();
            std::string_view s = trim(text);
            double scale = 0.0;
            if (s.ends_with("deg"))
            {
                scale = std::numbers::pi / 180.0;
                s.remove_suffix(3);
            }
            else if (s.ends_with("rad"))
            {
                scale = 1.0;
                s.remove_suffix(3);
            }
            else
                throw config_error(name + ": angle \"" + text + "\" has no unit suffix (deg or rad)");
            const auto v = parse_number(s);
            if (!v || !std::isfinite(*v))
                throw config_error(name + ": cannot parse angle \"" + text + "\"");
            return *v * scale;
        }

        inline std::string emit_angle(double radians) { return format_double(radians) + " rad"; }

        inline json emit_direction(const Direction &d)
        {
            return {{"azimuth", emit_angle(d.azimuth)}, {"elevation", emit_angle(d.elevation)}};
        }

        // Collects missing required fields so one error can list all of them.
        class FieldReader
        {
        public:
            explicit FieldReader(const json &root) : root_(root) {}

            const json *find(std::string_view dotted) const
            {
                const json *cur = &root_;
                std::size_t start = 0;
                while (start <= dotted.size())
                {
                    const auto dot = dotted.find('.', start);
                    const auto key = std::string(dotted.substr(start, dot == std::string_view::npos ? dotted.npos : dot - start));
                    if (!cur->is_object() || !cur->contains(key))
                        return nullptr;
                    cur = &(*cur)[key];
                    if (dot == std::string_view::npos)
                        break;
                    start = dot + 1;
                }
                return cur;
            }

            const json *require(const std::string &dotted)
            {
                const json *j = find(dotted);
                if (!j || j->is_null())
                    missing_.push_back(dotted);
                return j && !j->is_null() ? j : nullptr;
            }

            double number(const std::string &dotted)
            {
                const json *j = require(dotted);
                if (!j)
                    return 0.0;
                if (!j->is_number())
                    throw config_error(dotted + ": expected a number");
                return j->get<double>();
            }

            std::size_t count(const std::string &dotted)
            {
                const json *j = require(dotted);
                if (!j)
                    return 0;
                if (!j->is_number_integer() || j->get<long long>() < 0)
                    throw config_error(dotted + ": expected a non-negative integer");
                return j->get<std::size_t>();
            }

            Direction direction(const std::string &dotted)
            {
                const json *az = require(dotted + ".azimuth");
                const json *el = require(dotted + ".elevation");
                Direction d;
                if (az)
                    d.azimuth = parse_angle(*az, dotted + ".azimuth");
                if (el)
                    d.elevation = parse_angle(*el, dotted + ".elevation");
                return d;
            }

            void finish() const
            {
                if (missing_.empty())
                    return;
                std::string msg = "missing required field(s): ";
                for (std::size_t i = 0; i < missing_.size(); ++i)
                    msg += (i ? ", " : "") + missing_[i];
                throw config_error(msg);
            }

        private:
            const json &root_;
            std::vector<std::string> missing_;
        };

        inline std::string to_string(ExperimentKind k)
        {
            switch (k)
            {
            case ExperimentKind::density: return "density";
            case ExperimentKind::sweep: return "sweep";
            case ExperimentKind::single: return "single";
            }
            return "single";
        }

        inline std::string to_string(SweepMode m)
        {
            switch (m)
            {
            case SweepMode::fixed_spacing: return "fixed-spacing";
            case SweepMode::fixed_aperture: return "fixed-aperture";
            case SweepMode::exponent: return "exponent";
            }
            return "fixed-spacing";
        }

        inline std::string to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }

        inline OutputFormat parse_format(const std::string &s)
        {
            if (s == "csv")
                return OutputFormat::csv;
            if (s == "json")
                return OutputFormat::json;
            throw config_error("output.format: expected csv or json, got \"" + s + "\"");
        }

        inline std::size_t default_workers()
        {
            return std::max(1u, std::thread::hardware_concurrency());
        }
    }

    inline void validate(const ExperimentSpec &spec)
    {
        try
        {
            spec.config.validate();
        }
        catch (const domain_error &e)
        {
            throw config_error(e.what());
        }
        if (spec.kind == ExperimentKind::sweep)
        {
            if (spec.sweep_n.empty())
                throw config_error("sweep.N: at least one value required");
            for (std::size_t n : spec.sweep_n)
            {
                const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
                if (n == 0 || r * r != n)
                    throw config_error("sweep.N: " + std::to_string(n) + " is not a perfect square");
            }
            if (spec.sweep.mode == SweepMode::exponent && !spec.sweep.scaling)
                throw config_error("sweep: exponent mode requires scaling.A0 and scaling.q");
        }
        if (spec.output.path.empty())
            throw config_error("output.path: must not be empty");
        if (spec.far_field)
        {
            const double q = spec.sweep.scaling ? spec.sweep.scaling->q : 0.0;
            if (!(spec.far_field->D0 > 0.0))
                throw config_error("far_field.D0: must be positive");
            if (!(spec.far_field->gamma > 1.0 - q))
                throw config_error("far_field.gamma: must exceed 1 - q");
        }
    }

    [[nodiscard]] inline ExperimentSpec parse_config(const json &root)
    {
        if (!root.is_object())
            throw config_error("config: top level must be an object");
        detail::FieldReader r(root);
        ExperimentSpec spec;

        if (const json *k = r.require("kind"))
        {
            const auto s = k->is_string() ? k->get<std::string>() : "";
            if (s == "density")
                spec.kind = ExperimentKind::density;
            else if (s == "sweep")
                spec.kind = ExperimentKind::sweep;
            else if (s == "single")
                spec.kind = ExperimentKind::single;
            else
                throw config_error("kind: expected density, sweep or single");
        }

        const double wavelength = r.number("wavelength");
        auto &sys = spec.config.system;
        sys.alpha_d = r.number("system.alpha_d");
        sys.alpha_s = r.number("system.alpha_s");
        sys.alpha_r = r.number("system.alpha_r");
        sys.rho = r.number("system.rho");
        if (const json *k = r.require("system.kappa_r"))
        {
            if (k->is_number())
                sys.kappa_r = k->get<double>();
            else if (k->is_string() && std::string_view(k->get_ref<const std::string &>()).ends_with("dB"))
            {
                const auto &text = k->get_ref<const std::string &>();
                const auto v = detail::parse_number(std::string_view(text).substr(0, text.size() - 2));
                if (!v)
                    throw config_error("system.kappa_r: cannot parse \"" + text + "\"");
                sys.kappa_r = std::pow(10.0, *v / 10.0);
            }
            else
                throw config_error("system.kappa_r: expected a linear number or a string \"<x> dB\"");
        }
        sys.aoa_irs = r.direction("system.aoa_irs");
        sys.aod_irs = r.direction("system.aod_irs");
        sys.aod_tx = r.direction("system.aod_tx");

        auto geometry = [&](const std::string &name) {
            ArrayGeometry g;
            g.nx = r.count(name + ".nx");
            g.ny = r.count(name + ".ny");
            g.dx = r.number(name + ".dx");
            g.dy = r.number(name + ".dy");
            g.wavelength = wavelength;
            return g;
        };
        spec.config.tx_geometry = geometry("tx_array");
        if (spec.kind == ExperimentKind::sweep)
        {
            // Element counts come from sweep.N; only the spacing is taken from irs_array.
            spec.config.irs_geometry.dx = r.number("irs_array.dx");
            spec.config.irs_geometry.dy = r.number("irs_array.dy");
            spec.config.irs_geometry.wavelength = wavelength;
            if (const json *n = r.require("sweep.N"))
            {
                if (!n->is_array())
                    throw config_error("sweep.N: expected an array of integers");
                for (const auto &v : *n)
                {
                    if (!v.is_number_integer() || v.get<long long>() <= 0)
                        throw config_error("sweep.N: entries must be positive integers");
                    spec.sweep_n.push_back(v.get<std::size_t>());
                }
            }
            if (const json *m = r.find("sweep.mode"))
            {
                const auto s = m->is_string() ? m->get<std::string>() : "";
                if (s == "fixed-spacing")
                    spec.sweep.mode = SweepMode::fixed_spacing;
                else if (s == "fixed-aperture")
                    spec.sweep.mode = SweepMode::fixed_aperture;
                else if (s == "exponent")
                    spec.sweep.mode = SweepMode::exponent;
                else
                    throw config_error("sweep.mode: expected fixed-spacing, fixed-aperture or exponent");
            }
            if (!spec.sweep_n.empty())
            {
                const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(spec.sweep_n.front()))));
                spec.config.irs_geometry.nx = side;
                spec.config.irs_geometry.ny = side;
            }
        }
        else
            spec.config.irs_geometry = geometry("irs_array");

        if (root.contains("scaling"))
        {
            ScalingModel s;
            s.A0 = r.number("scaling.A0");
            s.q = r.number("scaling.q");
            spec.config.scaling = s;
            spec.sweep.scaling = s;
        }
        if (root.contains("far_field"))
        {
            FarFieldSpec f;
            f.distance = r.number("far_field.distance");
            f.D0 = r.number("far_field.D0");
            f.gamma = r.number("far_field.gamma");
            spec.far_field = f;
        }

        auto optional_count = [&](const char *key, std::size_t fallback) {
            return root.contains(key) ? r.count(key) : fallback;
        };
        spec.config.samples = optional_count("samples", 100000);
        spec.config.workers = optional_count("workers", detail::default_workers());
        spec.config.bins = optional_count("bins", 100);
        if (root.contains("seed"))
        {
            if (!root["seed"].is_number_unsigned())
                throw config_error("seed: expected a non-negative integer");
            spec.config.seed = root["seed"].get<std::uint64_t>();
        }
        if (const json *o = r.find("output.path"))
            spec.output.path = o->get<std::string>();
        if (const json *o = r.find("output.format"))
            spec.output.format = detail::parse_format(o->get<std::string>());

        const bool plot_default = spec.kind == ExperimentKind::density;
        spec.emit_histogram = root.value("emit_histogram", plot_default);
        spec.emit_analytic_overlay = root.value("emit_analytic_overlay", plot_default);

        r.finish();

        spec.config.system.area_tx_element = spec.config.tx_geometry.element_area();
        spec.config.system.area_irs_element = spec.config.irs_geometry.element_area();
        validate(spec);
        return spec;
    }

    [[nodiscard]] inline ExperimentSpec parse_config_text(const std::string &text)
    {
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw config_error(std::string("config: malformed JSON: ") + e.what());
        }
        return parse_config(root);
    }

    [[nodiscard]] inline json emit_config(const ExperimentSpec &spec)
    {
        const auto &c = spec.config;
        json j;
        j["kind"] = detail::to_string(spec.kind);
        j["wavelength"] = c.tx_geometry.wavelength;
        j["system"] = {{"alpha_d", c.system.alpha_d},
                       {"alpha_s", c.system.alpha_s},
                       {"alpha_r", c.system.alpha_r},
                       {"kappa_r", c.system.kappa_r},
                       {"rho", c.system.rho},
                       {"aoa_irs", detail::emit_direction(c.system.aoa_irs)},
                       {"aod_irs", detail::emit_direction(c.system.aod_irs)},
                       {"aod_tx", detail::emit_direction(c.system.aod_tx)}};
        j["tx_array"] = {{"nx", c.tx_geometry.nx}, {"ny", c.tx_geometry.ny}, {"dx", c.tx_geometry.dx}, {"dy", c.tx_geometry.dy}};
        if (spec.kind == ExperimentKind::sweep)
        {
            j["irs_array"] = {{"dx", c.irs_geometry.dx}, {"dy", c.irs_geometry.dy}};
            j["sweep"] = {{"N", spec.sweep_n}, {"mode", detail::to_string(spec.sweep.mode)}};
        }
        else
            j["irs_array"] = {{"nx", c.irs_geometry.nx}, {"ny", c.irs_geometry.ny}, {"dx", c.irs_geometry.dx}, {"dy", c.irs_geometry.dy}};
        if (c.scaling)
            j["scaling"] = {{"A0", c.scaling->A0}, {"q", c.scaling->q}};
        if (spec.far_field)
            j["far_field"] = {{"distance", spec.far_field->distance}, {"D0", spec.far_field->D0}, {"gamma", spec.far_field->gamma}};
        j["samples"] = c.samples;
        j["seed"] = c.seed;
        j["workers"] = c.workers;
        j["bins"] = c.bins;
        j["output"] = {{"path", spec.output.path}, {"format", detail::to_string(spec.output.format)}};
        j["emit_histogram"] = spec.emit_histogram;
        j["emit_analytic_overlay"] = spec.emit_analytic_overlay;
        return j;
    }

    inline void apply_overrides(ExperimentSpec &spec, const Overrides &o)
    {
        if (o.samples)
            spec.config.samples = *o.samples;
        if (o.seed)
            spec.config.seed = *o.seed;
        if (o.workers)
            spec.config.workers = *o.workers;
        if (o.output)
            spec.output.path = *o.output;
        if (o.format)
            spec.output.format = *o.format;
        if (o.bins)
            spec.config.bins = *o.bins;
        validate(spec);
    }

    // Perfect-square grid between 64 and 1296 used for the N-sweep preset
    inline const std::vector<std::size_t> &fig2_grid()
    {
        static const std::vector<std::size_t> grid{64, 144, 256, 400, 576, 784, 1024, 1296};
        return grid;
    }

    // Built-in presets. Lengths are normalized to a 2 m wavelength so that lambda/2
    // spacing gives unit element areas and alpha * A = 1 with unit path losses.
    [[nodiscard]] inline ExperimentSpec preset(std::string_view name)
    {
        constexpr double pi = std::numbers::pi;
        ExperimentSpec spec;
        auto &c = spec.config;
        c.tx_geometry = {2, 2, 1.0, 1.0, 2.0};
        c.irs_geometry = {8, 32, 1.0, 1.0, 2.0};
        c.system.alpha_d = 1.0;
        c.system.alpha_s = 1.0;
        c.system.alpha_r = 1.0;
        c.system.kappa_r = 1.0; // 0 dB
        c.system.rho = 1.0;
        c.system.area_tx_element = c.tx_geometry.element_area();
        c.system.area_irs_element = c.irs_geometry.element_area();
        c.system.aoa_irs = {pi / 6.0, pi / 3.0};
        c.system.aod_irs = {pi / 8.0, 2.0 * pi / 3.0};
        c.system.aod_tx = {pi / 7.0, pi / 5.0};
        c.samples = 100000;
        c.seed = 1;
        c.workers = detail::default_workers();
        c.bins = 100;

        if (name == "fig1")
        {
            spec.kind = ExperimentKind::density;
            spec.emit_histogram = true;
            spec.emit_analytic_overlay = true;
            spec.output.path = "fig1_out";
        }
        else if (name == "fig2")
        {
            spec.kind = ExperimentKind::sweep;
            spec.sweep_n = fig2_grid();
            spec.sweep.mode = SweepMode::fixed_spacing;
            c.irs_geometry.nx = 8;
            c.irs_geometry.ny = 8;
            spec.output.path = "fig2_out";
        }
        else
            throw config_error("unknown preset \"" + std::string(name) + "\" (expected fig1 or fig2)");
        return spec;
    }

    // Reads a config file. Also accepts an output file of a previous run, in which
    // case the embedded configuration is used.
    [[nodiscard]] inline ExperimentSpec load_config_file(const std::filesystem::path &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw io_error("cannot open config file " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();

        if (!text.empty() && text.front() == '#')
        {
            std::istringstream lines(text);
            std::string line;
            constexpr std::string_view tag = "# config: ";
            while (std::getline(lines, line))
                if (line.starts_with(tag))
                    return parse_config_text(line.substr(tag.size()));
            throw config_error(path.string() + ": no embedded '# config:' line");
        }
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw config_error(path.string() + ": malformed JSON: " + e.what());
        }
        if (root.is_object() && root.contains("metadata") && root["metadata"].contains("config"))
            return parse_config(root["metadata"]["config"]);
        return parse_config(root);
    }

    struct ExperimentResult
    {
        std::vector<SweepRecord> records;
        std::optional<HardeningDiagnostics> eigen_conditions;
        std::optional<HardeningDiagnostics> fit_empirical;
        std::optional<HardeningDiagnostics> fit_analytic;
        std::vector<std::string> warnings;
        std::vector<std::filesystem::path> files;
    };

    namespace detail
    {
        inline const std::vector<std::string> &record_columns()
        {
            static const std::vector<std::string> cols{"N", "Nx", "Ny", "spacing_x", "spacing_y", "q", "lambda_max",
                                                       "mu_C_analytic", "var_C_analytic", "mean_C_mc", "var_C_mc",
                                                       "ks_distance", "samples", "seed"};
            return cols;
        }

        inline double ks_or_nan(const EmpiricalStats &e)
        {
            return e.ks_distance.value_or(std::numeric_limits<double>::quiet_NaN());
        }

        inline json diagnostics_json(const HardeningDiagnostics &d)
        {
            json j = json::object();
            auto put = [&](const char *k, const std::optional<double> &v) {
                if (v)
                    j[k] = *v;
            };
            put("u_hat", d.u_hat);
            put("u_r2", d.u_r2);
            put("decay_slope", d.decay_slope);
            put("decay_r2", d.decay_r2);
            put("b_hat", d.b_hat);
            put("c_hat", d.c_hat);
            if (d.decay_slope)
                j["decay_pass"] = d.decay_pass;
            if (!d.u_residuals.empty())
            {
                j["lambda_ratio_decreasing"] = d.lambda_ratio_decreasing;
                j["inverse_area_gain_decreasing"] = d.inverse_area_gain_decreasing;
                j["u_residuals"] = d.u_residuals;
            }
            if (!d.decay_residuals.empty())
                j["decay_residuals"] = d.decay_residuals;
            return j;
        }

        inline std::string diagnostics_line(const std::string &label, const HardeningDiagnostics &d)
        {
            std::string s = "# " + label + ":";
            const json j = diagnostics_json(d);
            for (const auto &[k, v] : j.items())
            {
                if (v.is_array())
                    continue;
                s += " " + k + "=" + (v.is_boolean() ? std::string(v.get<bool>() ? "true" : "false") : format_double(v.get<double>()));
            }
            return s;
        }

        // Files are written under temporary names and renamed only once every write succeeded.
        class StagedOutput
        {
        public:
            explicit StagedOutput(std::filesystem::path dir) : dir_(std::move(dir))
            {
                std::error_code ec;
                std::filesystem::create_directories(dir_, ec);
                if (ec || !std::filesystem::is_directory(dir_))
                    throw io_error("output directory " + dir_.string() + " cannot be created");
            }

            StagedOutput(const StagedOutput &) = delete;
            StagedOutput &operator=(const StagedOutput &) = delete;

            ~StagedOutput()
            {
                if (committed_)
                    return;
                std::error_code ec;
                for (const auto &[tmp, final_path] : staged_)
                    std::filesystem::remove(tmp, ec);
            }

            // Fails early when the directory exists but is not writable
            void probe() const
            {
                const auto path = dir_ / ".write_probe.partial";
                {
                    std::ofstream out(path, std::ios::binary | std::ios::trunc);
                    if (!out)
                        throw io_error("output directory " + dir_.string() + " is not writable");
                }
                std::error_code ec;
                std::filesystem::remove(path, ec);
            }

            void write(const std::string &name, const std::string &content)
            {
                const auto final_path = dir_ / name;
                const auto tmp = dir_ / (name + ".partial");
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                if (!out)
                    throw io_error("cannot write " + tmp.string());
                staged_.emplace_back(tmp, final_path);
                out << content;
                out.close();
                if (!out)
                    throw io_error("write failed for " + tmp.string());
            }

            std::vector<std::filesystem::path> commit()
            {
                std::vector<std::filesystem::path> out;
                for (const auto &[tmp, final_path] : staged_)
                {
                    std::error_code ec;
                    std::filesystem::rename(tmp, final_path, ec);
                    if (ec)
                        throw io_error("cannot rename " + tmp.string() + ": " + ec.message());
                    out.push_back(final_path);
                }
                committed_ = true;
                return out;
            }

        private:
            std::filesystem::path dir_;
            std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
            bool committed_ = false;
        };

        inline double normal_pdf(double x, double mu, double sigma)
        {
            const double z = (x - mu) / sigma;
            return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
        }
    }

    // Runs the campaign(s) without writing anything.
    [[nodiscard]] inline ExperimentResult compute_experiment(const ExperimentSpec &spec)
    {
        validate(spec);
        ExperimentResult result;
        if (spec.kind == ExperimentKind::sweep)
            result.records = sweep_N(spec.config, spec.sweep_n, spec.sweep);
        else
            result.records.push_back(run_sweep_point(spec.config));

        for (const auto &rec : result.records)
            if (!rec.empirical.samples.empty() && rec.empirical.ks_distance && *rec.empirical.ks_distance > 0.02)
                result.warnings.push_back("N=" + std::to_string(rec.n) + ": KS distance " +
                                          detail::format_double(*rec.empirical.ks_distance) + " above 0.02");

        if (spec.kind == ExperimentKind::sweep && result.records.size() >= 4)
        {
            const auto scaling = effective_scaling(spec.config, spec.sweep).value_or(
                ScalingModel{spec.config.irs_geometry.dx * spec.config.irs_geometry.dy, 0.0});
            std::vector<EigenPoint> eig;
            std::vector<SweepPoint> emp, ana;
            for (const auto &rec : result.records)
            {
                const auto n = static_cast<double>(rec.n);
                eig.push_back({n, rec.lambda_max});
                emp.push_back({n, rec.empirical.variance, rec.empirical.mean});
                ana.push_back({n, rec.analytic.sigma_C * rec.analytic.sigma_C, rec.analytic.mu_C});
            }
            result.eigen_conditions = check_eigen_conditions(eig, scaling);
            const double u = *result.eigen_conditions->u_hat;
            if (std::all_of(emp.begin(), emp.end(), [](const SweepPoint &p) { return p.variance > 0.0; }))
                result.fit_empirical = hardening_fit(emp, u, scaling.q);
            if (std::all_of(ana.begin(), ana.end(), [](const SweepPoint &p) { return p.variance > 0.0; }))
                result.fit_analytic = hardening_fit(ana, u, scaling.q);
        }
        else if (spec.kind == ExperimentKind::sweep)
            result.warnings.push_back("fewer than 4 sweep points: hardening diagnostics skipped");

        if (spec.far_field)
        {
            const double q = spec.sweep.scaling ? spec.sweep.scaling->q : 0.0;
            for (const auto &rec : result.records)
            {
                const auto ff = far_field_check(spec.far_field->distance, static_cast<double>(rec.n),
                                                spec.far_field->D0, spec.far_field->gamma, q);
                if (ff.violated)
                    result.warnings.push_back("N=" + std::to_string(rec.n) + ": far-field margin " +
                                              detail::format_double(ff.margin) + " below 1");
            }
        }
        if (!spec.config.tx_geometry.spacing_within_half_wavelength())
            result.warnings.push_back("transmit array spacing exceeds half a wavelength");
        for (const auto &rec : result.records)
            if (rec.spacing_x > 0.5 * spec.config.irs_geometry.wavelength * (1 + 1e-12))
                result.warnings.push_back("N=" + std::to_string(rec.n) + ": IRS spacing exceeds half a wavelength");
        return result;
    }

    namespace detail
    {
        inline std::vector<std::string> provenance_notes(const ExperimentSpec &spec)
        {
            std::vector<std::string> notes;
            if (spec.kind == ExperimentKind::sweep && spec.sweep_n == fig2_grid())
                notes.push_back("intermediate N values are a perfect-square grid chosen by this tool");
            notes.push_back("var_C_mc is the unbiased sample variance; var_C_analytic is sigma_C^2 of the Gaussian approximation");
            return notes;
        }

        inline json metadata_json(const ExperimentSpec &spec, const ExperimentResult &res)
        {
            json m;
            m["tool"] = "irs-hardening";
            m["version"] = version;
            m["seed"] = spec.config.seed;
            m["config"] = emit_config(spec);
            m["notes"] = provenance_notes(spec);
            m["warnings"] = res.warnings;
            return m;
        }

        inline std::string records_csv(const ExperimentSpec &spec, const ExperimentResult &res)
        {
            std::string s;
            s += "# irs-hardening " + std::string(version) + "\n";
            s += "# config: " + emit_config(spec).dump() + "\n";
            for (const auto &n : provenance_notes(spec))
                s += "# note: " + n + "\n";
            const auto &cols = record_columns();
            for (std::size_t i = 0; i < cols.size(); ++i)
                s += (i ? "," : "") + cols[i];
            s += "\n";
            for (const auto &r : res.records)
            {
                s += std::to_string(r.n) + "," + std::to_string(r.nx) + "," + std::to_string(r.ny) + "," +
                     format_double(r.spacing_x) + "," + format_double(r.spacing_y) + "," + format_double(r.q) + "," +
                     format_double(r.lambda_max) + "," + format_double(r.analytic.mu_C) + "," +
                     format_double(r.analytic.sigma_C * r.analytic.sigma_C) + "," + format_double(r.empirical.mean) +
                     "," + format_double(r.empirical.variance) + "," + format_double(ks_or_nan(r.empirical)) + "," +
                     std::to_string(r.empirical.sample_count) + "," + std::to_string(spec.config.seed) + "\n";
            }
            if (res.eigen_conditions)
                s += diagnostics_line("eigen_conditions", *res.eigen_conditions) + "\n";
            if (res.fit_empirical)
                s += diagnostics_line("hardening_fit_mc", *res.fit_empirical) + "\n";
            if (res.fit_analytic)
                s += diagnostics_line("hardening_fit_analytic", *res.fit_analytic) + "\n";
            return s;
        }

        inline json records_json(const ExperimentSpec &spec, const ExperimentResult &res)
        {
            json j;
            j["metadata"] = metadata_json(spec, res);
            json rows = json::array();
            for (const auto &r : res.records)
            {
                json row;
                row["N"] = r.n;
                row["Nx"] = r.nx;
                row["Ny"] = r.ny;
                row["spacing_x"] = r.spacing_x;
                row["spacing_y"] = r.spacing_y;
                row["q"] = r.q;
                row["lambda_max"] = r.lambda_max;
                row["mu_C_analytic"] = r.analytic.mu_C;
                row["var_C_analytic"] = r.analytic.sigma_C * r.analytic.sigma_C;
                row["mean_C_mc"] = r.empirical.mean;
                row["var_C_mc"] = r.empirical.variance;
                row["ks_distance"] = r.empirical.ks_distance ? json(*r.empirical.ks_distance) : json(nullptr);
                row["samples"] = r.empirical.sample_count;
                row["seed"] = spec.config.seed;
                rows.push_back(std::move(row));
            }
            j["records"] = std::move(rows);
            if (res.eigen_conditions)
                j["eigen_conditions"] = diagnostics_json(*res.eigen_conditions);
            if (res.fit_empirical)
                j["hardening_fit_mc"] = diagnostics_json(*res.fit_empirical);
            if (res.fit_analytic)
                j["hardening_fit_analytic"] = diagnostics_json(*res.fit_analytic);
            return j;
        }

        struct HistogramRow
        {
            double left, right;
            std::size_t count;
            double density_mc;
            double density_analytic;
        };

        inline std::vector<HistogramRow> histogram_rows(const ExperimentSpec &spec, const SweepRecord &rec)
        {
            const auto &h = rec.empirical.histogram;
            const auto n = static_cast<double>(rec.empirical.sample_count);
            std::vector<HistogramRow> rows;
            for (std::size_t b = 0; b < h.bins(); ++b)
            {
                const double width = h.edges[b + 1] - h.edges[b];
                HistogramRow row{h.edges[b], h.edges[b + 1], h.counts[b],
                                 width > 0.0 ? static_cast<double>(h.counts[b]) / (n * width)
                                             : std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN()};
                if (spec.emit_analytic_overlay && rec.analytic.sigma_C > 0.0)
                    row.density_analytic = normal_pdf(0.5 * (row.left + row.right), rec.analytic.mu_C, rec.analytic.sigma_C);
                rows.push_back(row);
            }
            return rows;
        }

        inline std::string histogram_csv(const ExperimentSpec &spec, const SweepRecord &rec)
        {
            std::string s = "# irs-hardening " + std::string(version) + "\n";
            s += "# config: " + emit_config(spec).dump() + "\n";
            s += "bin_left,bin_right,count,density_mc,density_analytic\n";
            for (const auto &r : histogram_rows(spec, rec))
                s += format_double(r.left) + "," + format_double(r.right) + "," + std::to_string(r.count) + "," +
                     format_double(r.density_mc) + "," + format_double(r.density_analytic) + "\n";
            return s;
        }

        inline json histogram_json(const ExperimentSpec &spec, const ExperimentResult &res, const SweepRecord &rec)
        {
            json j;
            j["metadata"] = metadata_json(spec, res);
            json rows = json::array();
            for (const auto &r : histogram_rows(spec, rec))
            {
                auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
                rows.push_back({{"bin_left", r.left}, {"bin_right", r.right}, {"count", r.count},
                                {"density_mc", num(r.density_mc)}, {"density_analytic", num(r.density_analytic)}});
            }
            j["bins"] = std::move(rows);
            return j;
        }
    }

    // Runs the experiment and writes records, optional histogram and run metadata
    // into spec.output.path. Nothing is left behind when a step fails.
    inline ExperimentResult run_experiment(const ExperimentSpec &spec)
    {
        validate(spec);
        detail::StagedOutput staged(spec.output.path);
        staged.probe();

        ExperimentResult res = compute_experiment(spec);
        const bool csv = spec.output.format == OutputFormat::csv;
        if (csv)
            staged.write("records.csv", detail::records_csv(spec, res));
        else
            staged.write("records.json", detail::records_json(spec, res).dump(2) + "\n");
        if (spec.emit_histogram && spec.kind != ExperimentKind::sweep)
        {
            if (csv)
                staged.write("histogram.csv", detail::histogram_csv(spec, res.records.front()));
            else
                staged.write("histogram.json", detail::histogram_json(spec, res, res.records.front()).dump(2) + "\n");
        }
        staged.write("metadata.json", detail::metadata_json(spec, res).dump(2) + "\n");
        res.files = staged.commit();
        return res;
    }
}

#endif
