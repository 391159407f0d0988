#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/harmonic.hpp"

using namespace schurlab;
using namespace schurlab::testing;

namespace {

// Direct O(N^2) transform used as the oracle.
std::vector<Complex> naive_dft(const GridFunction& f) {
  std::vector<Complex> out(f.size());
  const double total = static_cast<double>(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const std::vector<int> xi = f.index(k);
    Complex acc = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const std::vector<int> x = f.index(j);
      double phase = 0.0;
      for (int a = 0; a < f.dim(); ++a) phase += static_cast<double>(xi[a]) * x[a] / f.shape()[a];
      acc += f.values()[j] * std::polar(1.0, -2.0 * std::numbers::pi * phase);
    }
    out[k] = acc / total;
  }
  return out;
}

GridFunction exponential(const std::vector<int>& shape, const std::vector<int>& xi) {
  return GridFunction::sample(shape, [&](const Point& x) {
    double phase = 0.0;
    for (std::size_t a = 0; a < xi.size(); ++a) phase += xi[a] * x[static_cast<Eigen::Index>(a)];
    return std::polar(1.0, 2.0 * std::numbers::pi * phase);
  });
}

double max_abs(const GridFunction& f) {
  double m = 0.0;
  for (const Complex& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST(Harmonic, FrequencyConvention) {
  EXPECT_EQ(frequency(0, 8), 0);
  EXPECT_EQ(frequency(3, 8), 3);
  EXPECT_EQ(frequency(4, 8), -4);
  EXPECT_EQ(frequency(7, 8), -1);
  EXPECT_EQ(frequency(2, 5), 2);
  EXPECT_EQ(frequency(3, 5), -2);
}

TEST(Harmonic, DftMatchesTheDirectSum) {
  Rng rng(51);
  for (const std::vector<int>& shape : {std::vector<int>{8}, std::vector<int>{5, 6}, std::vector<int>{3, 4, 2}}) {
    std::size_t total = 1;
    for (int s : shape) total *= static_cast<std::size_t>(s);
    std::vector<Complex> v(total);
    for (auto& c : v) c = Complex(random_real(rng, -1, 1), random_real(rng, -1, 1));
    const GridFunction f(shape, v);
    const GridFunction fhat = dft(f);
    const std::vector<Complex> oracle = naive_dft(f);
    for (std::size_t k = 0; k < total; ++k) EXPECT_LT(std::abs(fhat.values()[k] - oracle[k]), 1e-12);
    const GridFunction back = inverse_dft(fhat);
    for (std::size_t k = 0; k < total; ++k) EXPECT_LT(std::abs(back.values()[k] - v[k]), 1e-12);
  }
}

TEST(Harmonic, DirectionalHilbertSelectsAHalfSpace) {
  const std::vector<int> shape = {16, 16};
  Vector u(2);
  u << 1.0, 2.0;
  for (const std::vector<int>& xi : {std::vector<int>{1, 0}, std::vector<int>{-3, 1}, std::vector<int>{2, -1},
                                     std::vector<int>{0, 0}, std::vector<int>{-2, -1}}) {
    const GridFunction e = exponential(shape, xi);
    const double side = u[0] * xi[0] + u[1] * xi[1];
    const GridFunction h = directional_hilbert(e, u);
    const GridFunction p0 = hyperplane_projection(e, u);
    EXPECT_NEAR(max_abs(h), side > 0 ? 1.0 : 0.0, 1e-12);
    EXPECT_NEAR(max_abs(p0), side == 0 ? 1.0 : 0.0, 1e-12);
  }
  EXPECT_THROW(directional_hilbert(exponential(shape, {1, 1}), Vector::Zero(2)), Error);
}

TEST(Harmonic, RieszConstant) {
  EXPECT_NEAR(riesz_projection_constant(2.0), 1.0, 1e-15);
  EXPECT_NEAR(riesz_projection_constant(4.0), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(riesz_projection_constant(4.0 / 3.0), std::sqrt(2.0), 1e-14);
}

TEST(Harmonic, HalfSpaceProjectionRespectsTheRieszBound) {
  Rng rng(52);
  for (int t = 0; t < 20; ++t) {
    const double p = random_real(rng, 1.2, 6.0);
    const GridFunction f = random_trig_polynomial({32, 32}, 4, rng);
    Vector u = random_unit(2, rng);
    const double lhs = square_function_norm({directional_hilbert(f, u)}, p);
    const double rhs = square_function_norm({f}, p);
    EXPECT_LE(lhs, riesz_projection_constant(p) * rhs * (1 + 1e-9));
  }
}

TEST(Harmonic, SquareFunctionAtP2IsOrthogonalProjection) {
  Rng rng(53);
  std::vector<GridFunction> fs;
  std::vector<Vector> us;
  for (int j = 0; j < 3; ++j) {
    fs.push_back(random_trig_polynomial({16, 16}, 3, rng));
    us.push_back(random_unit(2, rng));
  }
  const SquareFunctionResult r = square_function_test(fs, us, 2.0, 1.0);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.lhs, r.rhs);
  EXPECT_FALSE(square_function_test(fs, us, 2.0, 0.1).pass);
}

TEST(Harmonic, SquareFunctionNormOfConstants) {
  const GridFunction one = GridFunction::sample({4, 4}, [](const Point&) { return Complex(1.0); });
  const GridFunction two = GridFunction::sample({4, 4}, [](const Point&) { return Complex(0.0, 2.0); });
  EXPECT_NEAR(square_function_norm({one, two}, 3.0), std::sqrt(5.0), 1e-14);
  EXPECT_NEAR(square_function_norm({one, two}, kInfinity), std::sqrt(5.0), 1e-14);
}

TEST(Harmonic, SolveTIntertwinesTheNormals) {
  Rng rng(54);
  for (int n = 1; n <= 4; ++n) {
    for (int t = 0; t < 10; ++t) {
      const Vector n1 = random_unit(n, rng) * random_real(rng, 0.2, 2.0);
      const Vector n2 = random_unit(n, rng) * random_real(rng, 0.2, 2.0);
      const RealMatrix tm = solve_T(n1, n2);
      EXPECT_LE((tm.transpose() * n1 + n2).norm(), 1e-12 * (1 + n2.norm()));
      EXPECT_GT(std::abs(tm.determinant()), 1e-8);
    }
  }
}

TEST(Harmonic, ScalingLimitIsExactForHalfspaces) {
  Vector a(2);
  a << 1.0, -0.4;
  Vector b(2);
  b << 0.7, 0.2;
  const SymbolSpec s = make_halfspace(a, b, 0.1);
  const BoundaryPoint z = boundary_project(s, s.anchor_x(), s.anchor_y(), ProjectDirection::Both);
  const ScalingLimitResult r = scaling_limit_check(s, z, solve_T(z.n1, z.n2), {1e-1, 1e-3}, 500, 9);
  EXPECT_EQ(r.fraction, 1.0);
  EXPECT_EQ(r.fractions.size(), 2u);
  EXPECT_EQ(r.fractions[0], 1.0);
}

TEST(Harmonic, ScalingLimitImprovesAsEpsilonShrinks) {
  const SymbolSpec s = make_ball(2);
  const BoundaryPoint z = boundary_project(s, s.anchor_x(), s.anchor_y(), ProjectDirection::Both);
  const ScalingLimitResult r = scaling_limit_check(s, z, solve_T(z.n1, z.n2), {0.3, 1e-4}, 1000, 10);
  EXPECT_GE(r.fractions[1], 0.99);
  EXPECT_GE(r.fractions[1], r.fractions[0]);
}
