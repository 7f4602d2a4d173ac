#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "cpofdm/micf.hpp"
#include "cpofdm/paraunitary.hpp"
#include "cpofdm/waveform_io.hpp"
#include "test_support.hpp"

using namespace cpofdm;
using namespace cpofdm::paraunitary;

namespace {

std::vector<double> power_profile(const std::vector<ComplexSeq>& pulses) {
    std::vector<double> p(pulses.front().size(), 0.0);
    for (const auto& s : pulses) {
        for (std::size_t k = 0; k < s.size(); ++k) p[k] += std::norm(s[k]);
    }
    return p;
}

}  // namespace

TEST(FactorCount, Values) {
    EXPECT_EQ(factor_count(2, 40), 19u);
    EXPECT_EQ(factor_count(4, 33), 7u);
    EXPECT_EQ(factor_count(3, 3), 0u);
    EXPECT_THROW(factor_count(0, 10), std::invalid_argument);
    EXPECT_THROW(factor_count(5, 4), std::invalid_argument);
}

TEST(RandomFactors, DeterministicAndWellFormed) {
    const auto a = random_factors(4, 33, 302, 2, 9);
    const auto b = random_factors(4, 33, 302, 2, 9);
    const auto c = random_factors(4, 33, 302, 2, 10);
    EXPECT_EQ(a.unitary, b.unitary);
    EXPECT_NE(a.unitary, c.unitary);
    ASSERT_EQ(a.vectors.size(), 7u);
    EXPECT_LT((a.unitary.adjoint() * a.unitary - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-13);
    for (const auto& v : a.vectors) EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    EXPECT_DOUBLE_EQ(a.scale, 1.0 / std::sqrt(302.0 * 2 * 4));
}

TEST(Synthesize, NoFactorsIsScaledUnitary) {
    auto f = random_factors(3, 3, 16, 1, 4);
    ASSERT_TRUE(f.vectors.empty());
    const PolyphaseMatrix pm = synthesize_polyphase(f);
    EXPECT_EQ(pm.degree(), 0u);
    EXPECT_LT((pm.taps()[0] - f.scale * f.unitary).norm(), 1e-15);
}

TEST(Synthesize, HandExpandedSingleFactor) {
    // V = I, v = e_0, scale 1: S(z) = diag(z^-1, 1)
    ParaunitaryFactors f;
    f.order = 2;
    f.unitary = Eigen::MatrixXcd::Identity(2, 2);
    f.vectors.push_back(Eigen::VectorXcd::Unit(2, 0));
    f.scale = 1.0;
    const PolyphaseMatrix pm = synthesize_polyphase(f);
    ASSERT_EQ(pm.degree(), 1u);
    EXPECT_EQ(pm.coefficients(0, 0), (ComplexSeq{0.0, 1.0}));
    EXPECT_EQ(pm.coefficients(1, 1), (ComplexSeq{1.0, 0.0}));
    EXPECT_EQ(pm.coefficients(0, 1), (ComplexSeq{0.0, 0.0}));
    EXPECT_EQ(pm.coefficients(1, 0), (ComplexSeq{0.0, 0.0}));
    const cplx z = std::polar(1.0, 0.3);
    const Eigen::MatrixXcd s = pm.evaluate(z);
    EXPECT_LT(std::abs(s(0, 0) - 1.0 / z), 1e-15);
    EXPECT_LT(std::abs(s(1, 1) - 1.0), 1e-15);
}

TEST(Synthesize, ParaunitaryOnUnitCircle) {
    const auto f = random_factors(4, 33, 302, 2, 3);
    const PolyphaseMatrix pm = synthesize_polyphase(f);
    EXPECT_EQ(pm.degree(), 7u);
    const double c = f.scale * f.scale;
    for (int i = 0; i < 64; ++i) {
        const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * i / 64.0 + 0.01);
        const Eigen::MatrixXcd s = pm.evaluate(z);
        EXPECT_LT((s * s.adjoint() - c * Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-15) << i;
    }
}

TEST(PolyphaseToPulses, SupportLengthAndPlacement) {
    // N=64, M=6, eta_max=5: first=10, last=54, N_t=45; P=2 -> 21 factors, 44 samples.
    const PulseLayout layout{64, 6, 5};
    ASSERT_EQ(layout.nonzero_length(), 45u);
    const auto f = random_factors(2, 45, 64, 1, 8);
    const auto pm = synthesize_polyphase(f);
    const auto pulses = polyphase_to_pulses(pm, 64, layout.first_nonzero());
    ASSERT_EQ(pulses.size(), 2u);
    for (std::size_t p = 0; p < 2; ++p) {
        const ComplexSeq t = dsp::idft_unitary(pulses[p]);
        for (std::size_t i = 0; i < 64; ++i) {
            if (i < 10 || i > 53) {
                EXPECT_LT(std::abs(t[i]), 1e-14) << "p=" << p << " i=" << i;
            }
        }
        for (std::size_t d = 0; d <= pm.degree(); ++d) {
            for (std::size_t q = 0; q < 2; ++q) {
                EXPECT_LT(std::abs(t[10 + 2 * d + q] - 8.0 * pm.coefficients(p, q)[d]), 1e-14);
            }
        }
        EXPECT_FALSE(zero_condition_violation(t, layout, 1e-12).has_value());
    }
}

TEST(PolyphaseToPulses, OverflowThrows) {
    std::vector<Eigen::MatrixXcd> taps(30, Eigen::MatrixXcd::Identity(2, 2));
    try {
        polyphase_to_pulses(PolyphaseMatrix(taps), 64, 10);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("N - eta_1st"), std::string::npos);
    }
    EXPECT_THROW(polyphase_to_pulses(PolyphaseMatrix({Eigen::MatrixXcd::Identity(2, 2)}), 16, 9),
                 std::invalid_argument);
}

class FlatPower : public ::testing::TestWithParam<std::tuple<std::size_t, std::size_t>> {};

TEST_P(FlatPower, SetAAndSetB) {
    const auto [order, n] = GetParam();
    const PulseLayout layout{n, 96, 40};
    const std::size_t t = 2;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto pulses = paraunitary_pulses(order, layout, t, seed);
        const auto prof = power_profile(pulses);
        const double expected = 1.0 / static_cast<double>(n * t);
        for (double pk : prof) EXPECT_NEAR(pk, expected, 1e-12 * expected);
        for (const auto& s : pulses) EXPECT_NEAR(dsp::energy(s), 1.0 / static_cast<double>(t * order), 1e-12);
        EXPECT_GE(micf::xi_db(pulses), -1e-10);
        EXPECT_LE(micf::xi_db(pulses), 0.0);
    }
}

INSTANTIATE_TEST_SUITE_P(Orders, FlatPower,
                         ::testing::Values(std::make_tuple(2u, 302u), std::make_tuple(4u, 302u),
                                           std::make_tuple(2u, 309u), std::make_tuple(4u, 309u)));

TEST(FactorsIo, RoundTrip) {
    const auto f = random_factors(4, 40, 309, 2, 21);
    std::stringstream buf;
    io::write_factors(buf, f);
    const auto g = io::read_factors(buf);
    EXPECT_EQ(g.order, f.order);
    EXPECT_EQ(g.nonzero_length, f.nonzero_length);
    EXPECT_EQ(g.num_subcarriers, f.num_subcarriers);
    EXPECT_EQ(g.num_tx, f.num_tx);
    EXPECT_EQ(g.unitary, f.unitary);
    ASSERT_EQ(g.vectors.size(), f.vectors.size());
    for (std::size_t i = 0; i < f.vectors.size(); ++i) EXPECT_EQ(g.vectors[i], f.vectors[i]);
    EXPECT_EQ(g.scale, f.scale);
}
