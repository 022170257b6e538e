#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "wsin/amplitude.hpp"
#include "wsin/error.hpp"
#include "wsin/losses.hpp"

using namespace wsin;
constexpr double kPi = std::numbers::pi;

namespace {

Eigen::VectorXd eigen_solve(const DenseMatrix& a, std::span<const double> b) {
  Eigen::Map<const Eigen::MatrixXd> m(a.data.data(), a.rows, a.cols);
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), b.size());
  return m.colPivHouseholderQr().solve(rhs);
}

// Frequencies in (0.05, pi - 0.05) with pairwise spacing of at least `gap`.
std::vector<double> spaced_frequencies(std::size_t k, double gap, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, kPi - 0.05);
  std::vector<double> out;
  while (out.size() < k) {
    const double w = u(rng);
    bool ok = true;
    for (double v : out) ok = ok && std::abs(v - w) >= gap;
    if (ok) out.push_back(w);
  }
  return out;
}

}  // namespace

TEST(LeastSquares, MatchesEigenOnRandomSystems) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 20 + trial;
    const std::size_t cols = 1 + trial % 8;
    DenseMatrix a(rows, cols);
    for (double& v : a.data) v = g(rng);
    std::vector<double> b(rows);
    for (double& v : b) v = g(rng);
    const auto x = least_squares_qr(a, b);
    const auto ref = eigen_solve(a, b);
    for (std::size_t i = 0; i < cols; ++i) {
      EXPECT_NEAR(x[i], ref(i), 1e-10 * std::max(1.0, std::abs(ref(i))));
    }
  }
}

TEST(LeastSquares, RankDeficiencyNamesColumns) {
  DenseMatrix a(6, 3);
  for (std::size_t r = 0; r < 6; ++r) {
    a(r, 0) = 1.0 + static_cast<double>(r);
    a(r, 1) = std::sin(static_cast<double>(r));
    a(r, 2) = 2.0 * a(r, 0);
  }
  try {
    least_squares_qr(a, std::vector<double>(6, 1.0));
    FAIL();
  } catch (const ConditioningError& e) {
    EXPECT_EQ(e.first_column(), 0u);
    EXPECT_EQ(e.second_column(), 2u);
  }
  EXPECT_THROW(least_squares_qr(DenseMatrix(2, 3), std::vector<double>(2, 1.0)), ValidationError);
  EXPECT_THROW(least_squares_qr(DenseMatrix(4, 1), std::vector<double>(3, 1.0)), ValidationError);
}

TEST(DesignMatrix, DependsOnAngleOnly) {
  SurrogateModel a{{std::polar(1.0, 0.7), std::polar(1.0, -2.0)}, {1.0, 1.0}, 32};
  SurrogateModel b{{std::polar(0.4, 0.7), std::polar(0.9, -2.0)}, {1.0, 1.0}, 32};
  const auto ua = design_matrix(a, BasisFunction::Cos);
  const auto ub = design_matrix(b, BasisFunction::Cos);
  EXPECT_EQ(ua.rows, 32u);
  EXPECT_EQ(ua.cols, 2u);
  EXPECT_EQ(ua.data, ub.data);
}

TEST(RenderSum, Examples) {
  for (double v : render_surrogate_sum({{{1.0, 0.0}}, {0.3}, 16})) EXPECT_NEAR(v, 1.0, 1e-15);
  SurrogateModel two{{std::polar(0.95, 0.5), std::polar(0.99, 1.7)}, {0.2, 3.0}, 64};
  const Signal sum = render_surrogate_sum(two);
  const Signal a = render_surrogate_sum({{two.params[0]}, {1.0}, 64});
  const Signal b = render_surrogate_sum({{two.params[1]}, {1.0}, 64});
  SurrogateModel unit = two;
  unit.amplitudes = {1.0, 1.0};
  const Signal fwd = surrogate_forward(unit);
  for (std::size_t n = 0; n < 64; ++n) {
    EXPECT_NEAR(sum[n], a[n] + b[n], 1e-14);
    EXPECT_EQ(sum[n], fwd[n]);
  }
}

TEST(RecoverAmplitudes, SelfFit) {
  const auto e = recover_amplitudes({{std::polar(1.0, 0.9)}, {0.6}, 512}, {});
  EXPECT_NEAR(e.least_squares[0], 1.0, 1e-8);
  EXPECT_NEAR(e.combined[0], 0.6, 1e-8);
}

TEST(RecoverAmplitudes, DecayingClosedForm) {
  const double w = 0.4 * kPi;
  const double r = 0.999;
  const auto e = recover_amplitudes({{std::polar(r, w)}, {1.0}, 4096}, {});
  double num = 0.0;
  double den = 0.0;
  for (int n = 0; n < 4096; ++n) {
    const double c = std::cos(w * n);
    num += std::pow(r, n) * c * c;
    den += c * c;
  }
  EXPECT_NEAR(e.least_squares[0], num / den, 1e-8);
}

TEST(RecoverAmplitudes, ThreeComponentsAllOnes) {
  SurrogateModel m{{std::polar(1.0, 0.3), std::polar(1.0, 1.1), std::polar(1.0, -2.4)},
                   {1.0, 1.0, 1.0}, 512};
  const auto e = recover_amplitudes(m, {});
  const auto ref = eigen_solve(design_matrix(m, BasisFunction::Cos), render_surrogate_sum(m));
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(e.least_squares[k], 1.0, 1e-6);
    EXPECT_NEAR(ref(k), 1.0, 1e-6);
  }
}

TEST(RecoverAmplitudes, MatchesEigenOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mag(0.995, 1.0);
  std::uniform_int_distribution<int> count(1, 8);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 256 + 64 * (trial % 4);
    const std::size_t k = count(rng);
    SurrogateModel m{{}, {}, n};
    for (double w : spaced_frequencies(k, 4 * kPi / n, rng)) {
      m.params.push_back(std::polar(mag(rng), w));
      m.amplitudes.push_back(1.0);
    }
    const auto e = recover_amplitudes(m, {});
    const auto ref = eigen_solve(design_matrix(m, BasisFunction::Cos), render_surrogate_sum(m));
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_NEAR(e.least_squares[i], ref(i), 1e-8 * std::abs(ref(i)));
    }
  }
}

TEST(RecoverAmplitudes, PermutationInvariant) {
  SurrogateModel a{{std::polar(0.99, 0.3), std::polar(0.999, 1.1), std::polar(1.0, 2.4)},
                   {1.0, 1.0, 1.0}, 256};
  SurrogateModel b{{a.params[2], a.params[0], a.params[1]}, {1.0, 1.0, 1.0}, 256};
  const auto ea = recover_amplitudes(a, {});
  const auto eb = recover_amplitudes(b, {});
  EXPECT_NEAR(ea.least_squares[0], eb.least_squares[1], 1e-12);
  EXPECT_NEAR(ea.least_squares[1], eb.least_squares[2], 1e-12);
  EXPECT_NEAR(ea.least_squares[2], eb.least_squares[0], 1e-12);
}

TEST(RecoverAmplitudes, CosRecoversSinCollapses) {
  SurrogateModel m{{std::polar(1.0, 0.4 * kPi)}, {1.0}, 1024};
  const auto c = recover_amplitudes(m, {}, BasisFunction::Cos);
  const auto s = recover_amplitudes(m, {}, BasisFunction::Sin);
  EXPECT_NEAR(c.least_squares[0], 1.0, 1e-10);
  EXPECT_LT(std::abs(s.least_squares[0]), 1e-2);
}

TEST(RecoverAmplitudes, DuplicateFrequenciesAreIllConditioned) {
  SurrogateModel m{{std::polar(1.0, 0.9), std::polar(0.95, 0.9)}, {0.5, 0.5}, 128};
  try {
    recover_amplitudes(m, {});
    FAIL();
  } catch (const ConditioningError& e) {
    EXPECT_EQ(e.first_column(), 0u);
    EXPECT_EQ(e.second_column(), 1u);
  }
}

TEST(RecoverAmplitudes, DftMagnitudeRepresentation) {
  SurrogateModel m{{std::polar(1.0, 0.25 * kPi), std::polar(1.0, 0.6 * kPi)}, {1.0, 1.0}, 256};
  const Representation rep{RepresentationTag::DftMagnitude, 512};
  EXPECT_EQ(rep.output_dimension(256), 512u);
  const auto e = recover_amplitudes(m, rep);
  for (double v : e.least_squares) EXPECT_NEAR(v, 1.0, 0.05);
  const auto h = apply_representation(rep, render_surrogate_sum(m));
  const auto mags = dft(render_surrogate_sum(m), 512).magnitudes();
  ASSERT_EQ(h.size(), 512u);
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_NEAR(h[i], mags[i], 1e-12);
}
