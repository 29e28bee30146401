#include "irs/experiment.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace irs;
namespace fs = std::filesystem;

namespace
{
    fs::path scratch(const std::string &name)
    {
        const auto p = fs::temp_directory_path() / ("irs_test_" + name);
        fs::remove_all(p);
        return p;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p);
        return {std::istreambuf_iterator<char>(in), {}};
    }
}

TEST(Presets, Fig1)
{
    const auto s = preset("fig1");
    constexpr double pi = std::numbers::pi;
    EXPECT_EQ(s.kind, ExperimentKind::density);
    EXPECT_EQ(s.config.tx_geometry.total(), 4u);
    EXPECT_EQ(s.config.irs_geometry.nx, 8u);
    EXPECT_EQ(s.config.irs_geometry.ny, 32u);
    EXPECT_EQ(s.config.irs_geometry.dx, s.config.irs_geometry.wavelength / 2);
    EXPECT_EQ(s.config.system.alpha_d * s.config.system.area_tx_element, 1.0);
    EXPECT_EQ(s.config.system.alpha_r * s.config.system.area_irs_element, 1.0);
    EXPECT_EQ(s.config.system.alpha_s * s.config.system.area_irs_element, 1.0);
    EXPECT_EQ(s.config.system.kappa_r, 1.0);
    EXPECT_EQ(s.config.system.rho, 1.0);
    EXPECT_EQ(s.config.system.aoa_irs, (Direction{pi / 6, pi / 3}));
    EXPECT_EQ(s.config.system.aod_irs, (Direction{pi / 8, 2 * pi / 3}));
    EXPECT_EQ(s.config.system.aod_tx, (Direction{pi / 7, pi / 5}));
    EXPECT_EQ(s.config.samples, 100000u);
    EXPECT_TRUE(s.emit_histogram);
}

TEST(Presets, Fig2)
{
    const auto s = preset("fig2");
    EXPECT_EQ(s.kind, ExperimentKind::sweep);
    EXPECT_EQ(s.sweep_n, (std::vector<std::size_t>{64, 144, 256, 400, 576, 784, 1024, 1296}));
    EXPECT_EQ(s.sweep.mode, SweepMode::fixed_spacing);
    EXPECT_THROW((void)preset("fig3"), config_error);
}

TEST(ParseConfig, RoundTrip)
{
    for (const char *name : {"fig1", "fig2"})
    {
        auto s = preset(name);
        EXPECT_EQ(parse_config(emit_config(s)), s) << name;
        EXPECT_EQ(parse_config_text(emit_config(s).dump()), s) << name;
    }
    auto s = preset("fig2");
    s.sweep.mode = SweepMode::exponent;
    s.sweep.scaling = ScalingModel{0.7, 0.3};
    s.config.scaling = s.sweep.scaling;
    s.far_field = FarFieldSpec{100.0, 2.0, 1.5};
    s.output.format = OutputFormat::json;
    s.config.seed = 0xFFFFFFFFFFFFFFFFull;
    EXPECT_EQ(parse_config(emit_config(s)), s);
}

TEST(ParseConfig, EmptyConfigListsAllMissingFields)
{
    try
    {
        (void)parse_config_text("{}");
        FAIL() << "expected config_error";
    }
    catch (const config_error &e)
    {
        const std::string msg = e.what();
        for (const char *f : {"kind", "wavelength", "system.alpha_d", "system.kappa_r", "system.aoa_irs.azimuth",
                              "tx_array.nx", "irs_array.dy"})
            EXPECT_NE(msg.find(f), std::string::npos) << f;
    }
}

TEST(ParseConfig, AnglesNeedUnits)
{
    auto j = emit_config(preset("fig1"));
    j["system"]["aoa_irs"]["azimuth"] = 30.0;
    EXPECT_THROW((void)parse_config(j), config_error);
    j["system"]["aoa_irs"]["azimuth"] = "30";
    EXPECT_THROW((void)parse_config(j), config_error);
    j["system"]["aoa_irs"]["azimuth"] = "30 deg";
    EXPECT_NEAR(parse_config(j).config.system.aoa_irs.azimuth, std::numbers::pi / 6, 1e-15);
}

TEST(ParseConfig, KappaInDecibels)
{
    auto j = emit_config(preset("fig1"));
    j["system"]["kappa_r"] = "10 dB";
    EXPECT_NEAR(parse_config(j).config.system.kappa_r, 10.0, 1e-12);
}

TEST(ParseConfig, SweepValidation)
{
    auto j = emit_config(preset("fig2"));
    j["sweep"]["N"] = {64, 100, 120};
    EXPECT_THROW((void)parse_config(j), config_error);
    j["sweep"]["N"] = {64, 100};
    j["sweep"]["mode"] = "exponent";
    EXPECT_THROW((void)parse_config(j), config_error); // no scaling
    j["scaling"] = {{"A0", 1.0}, {"q", 0.5}};
    EXPECT_NO_THROW((void)parse_config(j));
}

TEST(ParseConfig, MalformedJson)
{
    EXPECT_THROW((void)parse_config_text("{ not json"), config_error);
}

TEST(Overrides, FlagsWinOverFile)
{
    auto s = preset("fig1");
    Overrides o;
    o.samples = 123;
    o.seed = 9;
    o.workers = 3;
    o.output = "elsewhere";
    o.format = OutputFormat::json;
    o.bins = 7;
    apply_overrides(s, o);
    EXPECT_EQ(s.config.samples, 123u);
    EXPECT_EQ(s.config.seed, 9u);
    EXPECT_EQ(s.config.workers, 3u);
    EXPECT_EQ(s.output.path, "elsewhere");
    EXPECT_EQ(s.output.format, OutputFormat::json);
    EXPECT_EQ(s.config.bins, 7u);
    o.samples = 0;
    EXPECT_THROW(apply_overrides(s, o), config_error);
}

TEST(RunExperiment, DensityWritesDeterministicFiles)
{
    auto s = preset("fig1");
    s.config.samples = 1500;
    s.config.workers = 1;
    const auto dir_a = scratch("density_a"), dir_b = scratch("density_b");
    s.output.path = dir_a.string();
    const auto res = run_experiment(s);
    ASSERT_EQ(res.records.size(), 1u);
    EXPECT_TRUE(fs::exists(dir_a / "records.csv"));
    EXPECT_TRUE(fs::exists(dir_a / "histogram.csv"));
    EXPECT_TRUE(fs::exists(dir_a / "metadata.json"));

    const auto records = slurp(dir_a / "records.csv");
    EXPECT_NE(records.find("N,Nx,Ny,spacing_x,spacing_y,q,lambda_max,mu_C_analytic,var_C_analytic,mean_C_mc,"
                           "var_C_mc,ks_distance,samples,seed\n256,8,32,"),
              std::string::npos);
    const auto hist = slurp(dir_a / "histogram.csv");
    EXPECT_EQ(std::count(hist.begin(), hist.end(), '\n'), 3 + 100);

    // Regenerating from the embedded metadata gives byte-identical output
    auto again = load_config_file(dir_a / "records.csv");
    EXPECT_EQ(again.config, s.config);
    again.output.path = dir_b.string();
    (void)run_experiment(again);
    const auto rec_b = slurp(dir_b / "records.csv");
    // config echo differs only in the output path
    auto strip = [](std::string t, const std::string &p) {
        for (auto pos = t.find(p); pos != std::string::npos; pos = t.find(p))
            t.erase(pos, p.size());
        return t;
    };
    EXPECT_EQ(strip(records, dir_a.string()), strip(rec_b, dir_b.string()));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST(RunExperiment, SweepJsonHasFitSummary)
{
    auto s = preset("fig2");
    s.sweep_n = {16, 36, 64, 100};
    s.config.irs_geometry.nx = s.config.irs_geometry.ny = 4;
    s.config.samples = 600;
    s.config.workers = 2;
    s.output.format = OutputFormat::json;
    const auto dir = scratch("sweep_json");
    s.output.path = dir.string();
    (void)run_experiment(s);
    const auto j = json::parse(slurp(dir / "records.json"));
    EXPECT_EQ(j["records"].size(), 4u);
    EXPECT_TRUE(j["hardening_fit_mc"].contains("decay_slope"));
    EXPECT_TRUE(j["eigen_conditions"].contains("u_hat"));
    EXPECT_EQ(parse_config(j["metadata"]["config"]), s);
    EXPECT_EQ(load_config_file(dir / "records.json"), s);
    EXPECT_FALSE(fs::exists(dir / "histogram.json"));
    fs::remove_all(dir);
}

TEST(RunExperiment, InvalidOutputDirectoryLeavesNothing)
{
    const auto blocker = scratch("blocker");
    std::ofstream(blocker) << "file, not a directory";
    auto s = preset("fig1");
    s.config.samples = 100;
    s.output.path = (blocker / "sub").string();
    EXPECT_THROW((void)run_experiment(s), io_error);
    EXPECT_TRUE(fs::is_regular_file(blocker));
    fs::remove(blocker);
}

TEST(Cli, ExitCodes)
{
    const std::string exe = IRS_CLI_PATH;
    const auto dir = scratch("cli");
    fs::create_directories(dir);
    auto run = [](const std::string &cmd) {
        const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };

    std::ofstream(dir / "empty.json") << "{}";
    EXPECT_EQ(run(exe + " run " + (dir / "empty.json").string()), 2);
    EXPECT_EQ(run(exe + " run " + (dir / "missing.json").string()), 4);

    const auto blocker = dir / "blocker";
    std::ofstream(blocker) << "x";
    EXPECT_EQ(run(exe + " preset fig1 --samples 200 --output " + (blocker / "out").string()), 4);

    const auto out = dir / "ok";
    EXPECT_EQ(run(exe + " preset fig1 --samples 300 --workers 2 --bins 20 --format json --output " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "records.json"));
    EXPECT_TRUE(fs::exists(out / "histogram.json"));

    // regenerate from the emitted file
    EXPECT_EQ(run(exe + " run " + (out / "records.json").string() + " --output " + (dir / "re").string()), 0);
    EXPECT_EQ(slurp(out / "histogram.json").size(), slurp(dir / "re" / "histogram.json").size());

    EXPECT_EQ(run(exe + " preset fig1 --dump-config"), 0);
    EXPECT_EQ(run(exe + " preset nope"), 2);
    fs::remove_all(dir);
}
