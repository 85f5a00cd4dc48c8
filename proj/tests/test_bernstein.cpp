#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include <dmt/bernstein.hpp>
#include <dmt/linalg.hpp>

using namespace dmt;

namespace {

double row_sum(const BasisRow& row) {
  return std::accumulate(row.values.begin(), row.values.end(), 0.0);
}

}  // namespace

TEST(BasisRow, BernsteinQuadraticAtHalf) {
  const auto row = basis_row(BasisKind::Bernstein, 2, 0.5);
  ASSERT_EQ(row.values.size(), 3u);
  EXPECT_DOUBLE_EQ(row.values[0], 0.25);
  EXPECT_DOUBLE_EQ(row.values[1], 0.5);
  EXPECT_DOUBLE_EQ(row.values[2], 0.25);
}

TEST(BasisRow, ZeroToTheZeroIsOne) {
  const auto row = basis_row(BasisKind::Bernstein, 5, 0.0);
  EXPECT_EQ(row.values, (std::vector<double>{1, 0, 0, 0, 0, 0}));
  const auto power = basis_row(BasisKind::Power, 4, 0.0);
  EXPECT_EQ(power.values, (std::vector<double>{1, 0, 0, 0, 0}));
}

TEST(BasisRow, PowerIsPowersOfT) {
  const auto row = basis_row(BasisKind::Power, 3, 0.5);
  EXPECT_EQ(row.values, (std::vector<double>{1, 0.5, 0.25, 0.125}));
  EXPECT_EQ(row.degree, 3);
  EXPECT_EQ(row.kind, BasisKind::Power);
}

TEST(BasisRow, DegreeZeroIsConstantOne) {
  EXPECT_EQ(basis_row(BasisKind::Bernstein, 0, 0.3).values, std::vector<double>{1.0});
  EXPECT_EQ(basis_row_log(0, 0.3).values, std::vector<double>{1.0});
}

TEST(BasisRow, RejectsOutOfRangeArguments) {
  EXPECT_THROW(basis_row(BasisKind::Bernstein, 3, -0.01), DomainError);
  EXPECT_THROW(basis_row(BasisKind::Bernstein, 3, 1.01), DomainError);
  EXPECT_THROW(basis_row(BasisKind::Power, 3, std::nan("")), DomainError);
  EXPECT_THROW(basis_row(BasisKind::Bernstein, -1, 0.5), DomainError);
  EXPECT_THROW(basis_row(BasisKind::Bernstein, 1025, 0.5), CapacityError);
  EXPECT_THROW(basis_row_log(1025, 0.5), CapacityError);
  EXPECT_NO_THROW(basis_row_log(1024, 0.5));
  EXPECT_THROW(basis_row(BasisKind::Bernstein, 11, 0.5, BasisLimits{10}), CapacityError);
}

TEST(BasisRowLog, MatchesDirectAtModerateDegree) {
  const auto direct = basis_row(BasisKind::Bernstein, 10, 0.3);
  const auto log = basis_row_log(10, 0.3);
  for (std::size_t i = 0; i < direct.values.size(); ++i) {
    EXPECT_NEAR(log.values[i], direct.values[i], 1e-10 * direct.values[i]) << "i=" << i;
  }
}

TEST(BasisRowLog, Degree199AtHalfMatchesExactBinomials) {
  using boost::multiprecision::cpp_int;
  const auto row = basis_row_log(199, 0.5);
  cpp_int binom = 1;
  double sum = 0.0;
  for (int i = 0; i <= 199; ++i) {
    if (i > 0) binom = binom * (199 - i + 1) / i;
    const double exact = std::ldexp(binom.convert_to<double>(), -199);
    ASSERT_TRUE(std::isfinite(row.values[i]));
    EXPECT_NEAR(row.values[i], exact, 1e-12 + 1e-9 * exact) << "i=" << i;
    sum += row.values[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(BasisRowLog, BoundaryRowsAreExact) {
  const auto one = basis_row_log(400, 1.0);
  EXPECT_EQ(one.values.back(), 1.0);
  EXPECT_EQ(std::count(one.values.begin(), one.values.end(), 0.0), 400);
  const auto zero = basis_row_log(400, 0.0);
  EXPECT_EQ(zero.values.front(), 1.0);
  EXPECT_EQ(std::count(zero.values.begin(), zero.values.end(), 0.0), 400);
}

TEST(BasisRowLog, FiniteUpToMaximumDegree) {
  for (int n : {61, 199, 500, 1024}) {
    for (double t : {1e-9, 0.01, 0.37, 0.5, 0.99, 1.0 - 1e-9}) {
      const auto row = basis_row_log(n, t);
      for (double v : row.values) ASSERT_TRUE(std::isfinite(v)) << "n=" << n << " t=" << t;
      EXPECT_NEAR(row_sum(row), 1.0, 1e-9);
    }
  }
}

TEST(BasisRowLog, SinglePrecisionStaysFinite) {
  const auto f = basis_row_log<float>(199, 0.42f);
  const auto d = basis_row_log<double>(199, double(0.42f));
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    ASSERT_TRUE(std::isfinite(f.values[i]));
    EXPECT_NEAR(f.values[i], d.values[i], 1e-3);
  }
}

TEST(StableBasisRow, SwitchesToLogAboveThreshold) {
  const auto below = stable_basis_row(BasisKind::Bernstein, 60, 0.3);
  EXPECT_EQ(below.values, basis_row(BasisKind::Bernstein, 60, 0.3).values);
  const auto above = stable_basis_row(BasisKind::Bernstein, 61, 0.3);
  EXPECT_EQ(above.values, basis_row_log(61, 0.3).values);
  const auto power = stable_basis_row(BasisKind::Power, 100, 0.3);
  EXPECT_EQ(power.values, basis_row(BasisKind::Power, 100, 0.3).values);
  const auto custom = stable_basis_row(BasisKind::Bernstein, 20, 0.3, 10);
  EXPECT_EQ(custom.values, basis_row_log(20, 0.3).values);
}

TEST(BasisProperties, PartitionOfUnityAndNonNegativity) {
  for (int n = 0; n <= 200; ++n) {
    for (int k = 0; k <= 100; ++k) {
      const double t = k / 100.0;
      const auto row = basis_row(BasisKind::Bernstein, n, t);
      ASSERT_NEAR(row_sum(row), 1.0, 1e-9) << "n=" << n << " t=" << t;
      for (double v : row.values) ASSERT_GE(v, 0.0);
    }
  }
}

TEST(BasisProperties, Symmetry) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng() % 120);
    const double t = unit(rng);
    const auto a = stable_basis_row(BasisKind::Bernstein, n, t);
    const auto b = stable_basis_row(BasisKind::Bernstein, n, 1.0 - t);
    for (int i = 0; i <= n; ++i) {
      ASSERT_NEAR(a.values[i], b.values[n - i], 1e-12) << "n=" << n << " i=" << i;
    }
  }
}

TEST(BasisProperties, LogAgreesWithDirectUpToDegree30) {
  for (int n = 0; n <= 30; ++n) {
    for (int k = 0; k <= 100; ++k) {
      const double t = k / 100.0;
      const auto d = basis_row(BasisKind::Bernstein, n, t);
      const auto l = basis_row_log(n, t);
      for (int i = 0; i <= n; ++i) {
        ASSERT_NEAR(l.values[i], d.values[i], 1e-8 * std::max(d.values[i], 1e-300))
            << "n=" << n << " t=" << t << " i=" << i;
      }
    }
  }
}

TEST(Collocation, LinearEndpointsGiveIdentity) {
  const std::vector<double> nodes = {0.0, 1.0};
  EXPECT_TRUE(collocation_matrix(1, nodes).isApprox(Eigen::Matrix2d::Identity()));
}

TEST(Collocation, QuadraticRows) {
  const std::vector<double> nodes = {0.0, 0.5, 1.0};
  Eigen::Matrix3d expected;
  expected << 1, 0, 0, 0.25, 0.5, 0.25, 0, 0, 1;
  EXPECT_TRUE(collocation_matrix(2, nodes).isApprox(expected));
}

TEST(Collocation, CubicChebyshevIsWellConditioned) {
  const auto nodes = chebyshev_nodes(3);
  const double cond = condition_number(collocation_matrix(3, nodes));
  EXPECT_TRUE(std::isfinite(cond));
  EXPECT_LT(cond, 1e3);
}

TEST(Collocation, RejectsDuplicateOrMissingNodes) {
  const std::vector<double> dup = {0.0, 0.0, 1.0};
  EXPECT_THROW(collocation_matrix(2, dup), DegenerateInputError);
  const std::vector<double> few = {0.0, 1.0};
  EXPECT_THROW(collocation_matrix(2, few), DegenerateInputError);
}

TEST(ChebyshevNodes, AscendingInsideUnitInterval) {
  const auto nodes = chebyshev_nodes(7);
  ASSERT_EQ(nodes.size(), 8u);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    EXPECT_GT(nodes[k], 0.0);
    EXPECT_LT(nodes[k], 1.0);
    if (k) {
      EXPECT_GT(nodes[k], nodes[k - 1]);
    }
  }
}

TEST(SolveControlPoints, LinearSegment) {
  const std::vector<Vec2> samples = {{1, 2}, {7, -3}};
  const std::vector<double> nodes = {0.0, 1.0};
  const auto ctrl = solve_control_points(samples, nodes);
  EXPECT_EQ(ctrl, samples);
}

TEST(SolveControlPoints, RecoversCubicFromThirds) {
  const std::vector<Vec2> truth = {{0, 0}, {10, 30}, {40, -5}, {50, 20}};
  const std::vector<double> nodes = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  std::vector<Vec2> samples;
  for (double u : nodes) {
    const auto row = basis_row(BasisKind::Bernstein, 3, u);
    Vec2 p;
    for (int i = 0; i < 4; ++i) p += row.values[i] * truth[i];
    samples.push_back(p);
  }
  const auto ctrl = solve_control_points(samples, nodes);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(ctrl[i].x, truth[i].x, 1e-8);
    EXPECT_NEAR(ctrl[i].y, truth[i].y, 1e-8);
  }
}

TEST(SolveControlPoints, DuplicateNodesRejected) {
  const std::vector<Vec2> samples = {{0, 0}, {1, 1}, {2, 2}};
  const std::vector<double> nodes = {0.0, 0.0, 1.0};
  EXPECT_THROW(solve_control_points(samples, nodes), DegenerateInputError);
}

TEST(SolveControlPoints, NearlyCoincidentNodesAreIllConditioned) {
  const int m = 6;
  std::vector<double> nodes(m + 1);
  for (int k = 0; k <= m; ++k) nodes[k] = 0.5 + k * 1e-4;
  std::vector<Vec2> samples(m + 1, Vec2{1, 1});
  EXPECT_THROW(solve_control_points(samples, nodes), ConditioningError);
}

TEST(SolveControlPoints, RandomRoundTripUpToDegree10) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-500.0, 500.0);
  for (int m = 1; m <= 10; ++m) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Vec2> truth(m + 1);
      for (auto& p : truth) p = {coord(rng), coord(rng)};
      const auto nodes = chebyshev_nodes(m);
      std::vector<Vec2> samples;
      for (double u : nodes) {
        const auto row = basis_row(BasisKind::Bernstein, m, u);
        Vec2 p;
        for (int i = 0; i <= m; ++i) p += row.values[i] * truth[i];
        samples.push_back(p);
      }
      const auto ctrl = solve_control_points(samples, nodes);
      for (int i = 0; i <= m; ++i) {
        ASSERT_NEAR(ctrl[i].x, truth[i].x, 1e-8);
        ASSERT_NEAR(ctrl[i].y, truth[i].y, 1e-8);
      }
    }
  }
}

TEST(BasisKindNames, RoundTrip) {
  EXPECT_EQ(basis_kind_from_string(to_string(BasisKind::Bernstein)), BasisKind::Bernstein);
  EXPECT_EQ(basis_kind_from_string(to_string(BasisKind::Power)), BasisKind::Power);
  EXPECT_THROW(basis_kind_from_string("chebyshev"), Error);
}
