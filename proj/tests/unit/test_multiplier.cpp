#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/geometry.hpp"
#include "schurlab/multiplier.hpp"

using namespace schurlab;
using namespace schurlab::testing;

TEST(Multiplier, RadicalInverseValues) {
  EXPECT_DOUBLE_EQ(radical_inverse(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(radical_inverse(3, 2), 0.75);
  EXPECT_DOUBLE_EQ(radical_inverse(6, 2), 0.375);
  EXPECT_NEAR(radical_inverse(5, 3), 2.0 / 3.0 + 1.0 / 9.0, 1e-15);
}

TEST(Multiplier, HaltonGridsAreNestedAndInsideTheBox) {
  const Box box = {{-1, 2}, {0, 5}};
  const Grid small = halton_grid(box, 16);
  const Grid large = halton_grid(box, 64);
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i], large[i]);
  for (const Point& p : large) EXPECT_TRUE(box_contains(box, p));
}

TEST(Multiplier, IndexGridDiscretizesTheTriangularProjection) {
  const int n = 7;
  const Matrix m = discretize_symbol(make_triangular(), index_grid(n), index_grid(n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) EXPECT_EQ(m(j, k), (j >= k ? 1.0 : 0.0));
  }
}

TEST(Multiplier, NormGrowthIsMonotoneOnNestedGrids) {
  SamplerConfig sampler;
  sampler.budget = 2;
  for (GridKind kind : {GridKind::Index, GridKind::Halton}) {
    sampler.grid = kind;
    const auto rec = norm_growth_experiment(make_triangular(), 3.0, {4, 8, 16, 32}, sampler, 3);
    ASSERT_EQ(rec.size(), 4u);
    for (std::size_t i = 1; i < rec.size(); ++i) {
      EXPECT_GE(rec[i].lower_bound, rec[i - 1].lower_bound);
      EXPECT_EQ(rec[i].n, rec[i - 1].n * 2);
    }
    EXPECT_EQ(rec[0].symbol_id, "triangular(offset=0.5)");
  }
}

TEST(Multiplier, GrowthSummaryFitsTheSlope) {
  std::vector<NormGrowthRecord> rec;
  for (int k = 3; k <= 6; ++k) {
    NormGrowthRecord r;
    r.n = 1 << k;
    r.lower_bound = 1.0 + 0.2 * k;
    rec.push_back(r);
  }
  const GrowthSummary s = summarize_growth(rec);
  EXPECT_NEAR(s.slope_per_doubling, 0.2, 1e-12);
  EXPECT_TRUE(s.growing);
  for (auto& r : rec) r.lower_bound = 1.3;
  EXPECT_FALSE(summarize_growth(rec).growing);
}

TEST(Multiplier, ReparamsInvertAndDifferentiate) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Reparam r = random_reparam(3, seed);
    Rng rng(seed);
    for (int t = 0; t < 10; ++t) {
      const Point x = random_point_in(uniform_box(3, -2, 2), rng);
      EXPECT_LE((r.inverse(r.forward(x)) - x).norm(), 1e-10);
      const RealMatrix j = r.jacobian(x);
      for (int k = 0; k < 3; ++k) {
        const double h = 1e-6;
        Point a = x;
        Point b = x;
        a[k] += h;
        b[k] -= h;
        EXPECT_LE(((r.forward(a) - r.forward(b)) / (2 * h) - j.col(k)).norm(), 1e-6 * (1 + j.norm()));
      }
    }
  }
  const Reparam c = compose(affine_reparam(Vector::Constant(1, 2.0), Vector::Constant(1, 1.0)), cubic_reparam(1, 0.5));
  EXPECT_NEAR(c.forward(Point::Constant(1, 0.5))[0], 2.0 + 0.5 * 8.0, 1e-14);
}

TEST(Multiplier, GridPullbackLeavesTheDiscretizationUnchanged) {
  // Pulling back by (rx, ry) and sampling at the preimage grid reproduces the
  // original matrix exactly.
  for (const SymbolSpec& s : {make_ball(2), make_sphere_delta(2, 0.3), make_triangular()}) {
    const Reparam rx = random_reparam(s.m_dim(), 17);
    const Reparam ry = random_reparam(s.n_dim(), 18);
    const SymbolSpec pulled = pullback_symbol(s, rx, ry);
    const auto [gx, gy] = experiment_grids(s, GridKind::Halton, 24);
    Grid px;
    Grid py;
    for (const Point& p : gx) px.push_back(rx.inverse(p));
    for (const Point& p : gy) py.push_back(ry.inverse(p));
    const Matrix a = discretize_symbol(s, gx, gy);
    const Matrix b = discretize_symbol(pulled, px, py);
    EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0) << s.id();
  }
}

TEST(Multiplier, PullbackDerivativesFollowTheChainRule) {
  const SymbolSpec s = make_sphere_delta(2, 0.3);
  const SymbolSpec p = pullback_symbol(s, random_reparam(2, 4), random_reparam(2, 5));
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    const Point x = random_point_in(p.box_x(), rng, 0.5);
    const Point y = random_point_in(p.box_y(), rng, 0.5);
    const Gradient g = gradient(p, x, y);
    const Gradient fd = finite_difference_gradient(p, x, y);
    EXPECT_LE((g.dx - fd.dx).norm() + (g.dy - fd.dy).norm(), 1e-6 * (1 + g.norm()));
    EXPECT_LE((mixed_hessian(p, x, y) - finite_difference_mixed_hessian(p, x, y)).norm(),
              1e-4 * (1 + mixed_hessian(p, x, y).norm()));
  }
}

TEST(Multiplier, CirculantStructure) {
  Eigen::VectorXcd c(4);
  c << 1.0, 2.0, 3.0, 4.0;
  const Matrix x = circulant(c);
  EXPECT_EQ(x(0, 0), Complex(1.0));
  EXPECT_EQ(x(1, 0), Complex(2.0));
  EXPECT_EQ(x(0, 1), Complex(4.0));
  EXPECT_TRUE(is_circulant(x));
  Matrix y = x;
  y(0, 0) = 9.0;
  EXPECT_FALSE(is_circulant(y));
}

TEST(Multiplier, FourierMultiplierOnCirculantsIsTheSchurAction) {
  Rng rng(42);
  for (int t = 0; t < 10; ++t) {
    const int n = random_int(rng, 2, 12);
    const Eigen::VectorXcd c = random_complex(n, 1, rng).col(0);
    Eigen::VectorXcd m = random_zero_one(n, 1, rng).col(0);
    const Matrix x = circulant(c);
    EXPECT_LE((fourier_multiplier_cyclic(x, m) - schur_product(herz_schur_cyclic(m), x)).norm(), 1e-12);
  }
}

TEST(Multiplier, CompressionWeights) {
  Matrix x = Matrix::Ones(2, 2);
  Vector phi(2);
  phi << 4.0, 0.0;
  Vector psi(2);
  psi << 1.0, 9.0;
  const Matrix j2 = compression_jp(x, phi, psi, 2.0);
  EXPECT_NEAR(j2(0, 1).real(), 2.0 * 3.0, 1e-14);
  EXPECT_EQ(j2(1, 0), Complex(0.0));
  const Matrix jinf = compression_jp(x, phi, psi, kInfinity);
  EXPECT_EQ(jinf(0, 1), Complex(1.0));
  EXPECT_EQ(jinf(1, 1), Complex(0.0));
  phi[0] = -1.0;
  EXPECT_THROW(compression_jp(x, phi, psi, 2.0), Error);
}
