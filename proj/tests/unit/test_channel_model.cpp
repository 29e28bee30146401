#include "irs/channel_model.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace irs;
constexpr double pi = std::numbers::pi;

namespace
{
    SystemParams reference_params()
    {
        SystemParams p;
        p.aoa_irs = {pi / 6, pi / 3};
        p.aod_irs = {pi / 8, 2 * pi / 3};
        p.aod_tx = {pi / 7, pi / 5};
        return p;
    }
}

TEST(SincCovariance, SingleElement)
{
    const auto cov = build_sinc_covariance({1, 1, 0.5, 0.5, 1.0});
    EXPECT_EQ(cov.dim(), 1);
    EXPECT_EQ(cov.entries()(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(cov.lambda_max(), 1.0);
}

TEST(SincCovariance, HalfWavelengthNeighboursDecorrelate)
{
    const auto cov = build_sinc_covariance({3, 3, 0.5, 0.5, 1.0});
    EXPECT_NEAR(cov.entries()(0, 1), 0.0, 1e-15); // horizontal neighbour
    EXPECT_NEAR(cov.entries()(0, 3), 0.0, 1e-15); // vertical neighbour
    EXPECT_NEAR(cov.entries()(0, 4), sinc(std::numbers::sqrt2), 1e-15);
    EXPECT_NE(cov.entries()(0, 4), 0.0);
}

TEST(SincCovariance, Invariants)
{
    for (const ArrayGeometry g : {ArrayGeometry{8, 32, 0.5, 0.5, 1.0}, ArrayGeometry{6, 6, 0.1, 0.2, 1.0},
                                  ArrayGeometry{12, 12, 0.25, 0.25, 1.0}})
    {
        const auto cov = build_sinc_covariance(g);
        const auto &r = cov.entries();
        const auto n = static_cast<double>(g.total());
        for (Eigen::Index i = 0; i < r.rows(); ++i)
        {
            ASSERT_EQ(r(i, i), 1.0);
            for (Eigen::Index j = 0; j < r.cols(); ++j)
                ASSERT_EQ(r(i, j), r(j, i));
        }
        EXPECT_GE(cov.lambda_min(), 0.0);
        EXPECT_GE(cov.min_raw_eigenvalue(), -1e-8 * cov.lambda_max());
        EXPECT_NEAR(cov.eigenvalues().sum(), n, 1e-9 * n);
        EXPECT_LE(std::abs(cov.trace_deviation()), 1e-9 * n);
        EXPECT_GE(cov.lambda_max(), 1.0);
        EXPECT_LE(cov.lambda_max(), n);
        for (Eigen::Index i = 1; i < cov.eigenvalues().size(); ++i)
            ASSERT_LE(cov.eigenvalues()(i), cov.eigenvalues()(i - 1));

        // Coloring factor reproduces R
        const Eigen::MatrixXd rebuilt = cov.coloring() * cov.coloring().transpose();
        EXPECT_LT((rebuilt - r).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(CovarianceMatrix, RejectsIndefiniteMatrix)
{
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 2.0, 2.0, 1.0; // eigenvalues 3 and -1
    EXPECT_THROW((void)CovarianceMatrix::from_matrix(m), numerical_error);
}

TEST(CovarianceMatrix, RejectsMalformedInput)
{
    Eigen::MatrixXd diag = Eigen::MatrixXd::Identity(3, 3);
    diag(1, 1) = 0.9;
    EXPECT_THROW((void)CovarianceMatrix::from_matrix(diag), domain_error);

    Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
    asym(0, 1) = 0.1;
    EXPECT_THROW((void)CovarianceMatrix::from_matrix(asym), domain_error);
}

TEST(CovarianceMatrix, RankOneIsRepaired)
{
    const auto cov = CovarianceMatrix::from_matrix(Eigen::MatrixXd::Ones(50, 50));
    EXPECT_NEAR(cov.lambda_max(), 50.0, 1e-10);
    EXPECT_GE(cov.lambda_min(), 0.0);
}

TEST(LosT, ScalarCase)
{
    auto p = reference_params();
    const auto t = build_los_T(p, {1, 1, 0.5, 0.5, 1.0}, {1, 1, 0.5, 0.5, 1.0});
    ASSERT_EQ(t.rows(), 1);
    ASSERT_EQ(t.cols(), 1);
    EXPECT_EQ(t(0, 0), std::complex<double>(1.0, 0.0));
}

TEST(LosT, FrobeniusNormAndRank)
{
    auto p = reference_params();
    const ArrayGeometry tx{2, 2, 0.5, 0.5, 1.0}, irs{16, 16, 0.5, 0.5, 1.0};
    const auto t = build_los_T(p, tx, irs);
    EXPECT_EQ(t.rows(), 256);
    EXPECT_EQ(t.cols(), 4);
    EXPECT_NEAR(t.squaredNorm(), 1024.0, 1e-9);

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t);
    const auto s = svd.singularValues();
    EXPECT_NEAR(s(0), std::sqrt(1024.0), 1e-9);
    for (Eigen::Index i = 1; i < s.size(); ++i)
        EXPECT_LT(s(i), 1e-9);

    p.alpha_s = 3.0;
    p.area_irs_element = 0.5;
    EXPECT_NEAR(build_los_T(p, tx, irs).squaredNorm(), 1.5 * 1024.0, 1e-8);
}

TEST(LosHBar, Basics)
{
    const ArrayGeometry irs{16, 16, 0.5, 0.5, 1.0};
    const auto h = build_los_h_bar(irs, {pi / 8, 2 * pi / 3});
    EXPECT_EQ(h(0), std::complex<double>(1.0, 0.0));
    EXPECT_NEAR(h.squaredNorm(), 256.0, 1e-10);
    const std::complex<double> qf = h.dot(Eigen::MatrixXcd::Identity(256, 256) * h);
    EXPECT_NEAR(qf.real(), 256.0, 1e-10);
}

TEST(SampleDirect, MeanPowerAndIndependence)
{
    auto p = reference_params();
    p.alpha_d = 2.0;
    p.area_tx_element = 1.5;
    const ArrayGeometry tx{2, 1, 0.5, 0.5, 1.0};
    const int draws = 100000;
    double power = 0, re_cross = 0, im_cross = 0;
    for (int r = 0; r < draws; ++r)
    {
        Substream rng(42, static_cast<std::uint64_t>(r));
        const auto h = sample_direct(p, tx, rng);
        power += std::norm(h(0));
        const auto c = h(0) * std::conj(h(1));
        re_cross += c.real();
        im_cross += c.imag();
    }
    power /= draws;
    EXPECT_NEAR(power, 3.0, 0.03 * 3.0);
    // |E[h0 h1*]| has standard error 3 / sqrt(2 n) per component; allow 5 sigma
    const double se = 3.0 / std::sqrt(2.0 * draws);
    EXPECT_LT(std::abs(re_cross / draws), 5 * se);
    EXPECT_LT(std::abs(im_cross / draws), 5 * se);
}

TEST(SampleDirect, ZeroLossGivesZeroVector)
{
    auto p = reference_params();
    p.alpha_d = 0.0;
    Substream rng(1, 0);
    EXPECT_EQ(sample_direct(p, {2, 2, 0.5, 0.5, 1.0}, rng).squaredNorm(), 0.0);
}

TEST(SampleReflect, PowerCovarianceAndRicianSplit)
{
    auto p = reference_params();
    p.alpha_r = 2.0;
    p.area_irs_element = 0.75;
    p.kappa_r = 3.0;
    const ArrayGeometry irs{4, 4, 0.25, 0.25, 1.0}; // strongly correlated
    const auto cov = build_sinc_covariance(irs);
    const auto h_bar = build_los_h_bar(irs, p.aod_irs);
    const Eigen::Index n = cov.dim();

    const int draws = 100000;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXd power = Eigen::VectorXd::Zero(n);
    double nlos_power = 0.0;
    const auto w = rician_weights(p);
    for (int r = 0; r < draws; ++r)
    {
        Substream rng(9, static_cast<std::uint64_t>(r));
        const auto d = sample_reflect(p, cov, h_bar, rng);
        acc.noalias() += d.h_tilde_r * d.h_tilde_r.adjoint();
        power += d.h_r.cwiseAbs2();
        nlos_power += (d.h_r - w.los * h_bar).squaredNorm();
    }
    acc /= draws;
    power /= draws;

    const double expected_power = p.alpha_r * p.area_irs_element;
    for (Eigen::Index i = 0; i < n; ++i)
        EXPECT_NEAR(power(i), expected_power, 0.03 * expected_power);
    EXPECT_LE((acc - cov.entries().cast<std::complex<double>>()).cwiseAbs().maxCoeff(), 0.05);

    const double total_power = expected_power * static_cast<double>(n);
    EXPECT_NEAR(nlos_power / draws / total_power, 1.0 / (p.kappa_r + 1.0), 0.01);
}

TEST(SampleReflect, LosLimitIsDeterministic)
{
    auto p = reference_params();
    p.kappa_r = 1e12;
    p.alpha_r = 2.0;
    const ArrayGeometry irs{4, 3, 0.5, 0.5, 1.0};
    const auto cov = build_sinc_covariance(irs);
    const auto h_bar = build_los_h_bar(irs, p.aod_irs);
    Substream rng(3, 0);
    const auto d = sample_reflect(p, cov, h_bar, rng);
    const Eigen::VectorXcd expected = std::sqrt(p.alpha_r * p.area_irs_element) * h_bar;
    EXPECT_LE((d.h_r - expected).norm(), 1e-5 * expected.norm());
}

TEST(SampleReflect, DimensionMismatch)
{
    const auto p = reference_params();
    const auto cov = build_sinc_covariance({3, 3, 0.5, 0.5, 1.0});
    Substream rng(3, 0);
    EXPECT_THROW((void)sample_reflect(p, cov, Eigen::VectorXcd::Ones(4), rng), domain_error);
}

TEST(Substream, SeedDeterminism)
{
    const auto p = reference_params();
    const ArrayGeometry tx{2, 2, 0.5, 0.5, 1.0}, irs{6, 6, 0.5, 0.5, 1.0};
    const auto cov = build_sinc_covariance(irs);
    const auto los = build_los(p, tx, irs);

    Substream a(77, 12), b(77, 12), c(77, 13), d(78, 12);
    const auto ra = sample_channel(p, tx, cov, los, a);
    const auto rb = sample_channel(p, tx, cov, los, b);
    const auto rc = sample_channel(p, tx, cov, los, c);
    const auto rd = sample_channel(p, tx, cov, los, d);
    EXPECT_EQ(ra.h_d, rb.h_d);
    EXPECT_EQ(ra.h_r, rb.h_r);
    EXPECT_EQ(ra.T, rc.T); // deterministic per configuration
    EXPECT_NE(ra.h_d, rc.h_d);
    EXPECT_NE(ra.h_d, rd.h_d);
}
