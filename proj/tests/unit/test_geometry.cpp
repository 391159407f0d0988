#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "schurlab/errors.hpp"
#include "schurlab/geometry.hpp"

using namespace schurlab;
using namespace schurlab::testing;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

BoundaryPoint anchor_point(const SymbolSpec& s) {
  return boundary_project(s, s.anchor_x(), s.anchor_y(), ProjectDirection::Both);
}

}  // namespace

TEST(Geometry, ProjectionLandsOnTheBoundary) {
  Rng rng(31);
  for (const SymbolSpec& s : {make_ball(2), make_sphere_delta(2, 0.3), make_toeplitz_ball(3)}) {
    for (ProjectDirection d : {ProjectDirection::Y, ProjectDirection::X, ProjectDirection::Both}) {
      for (int t = 0; t < 10; ++t) {
        const Point x = s.anchor_x() + 0.05 * random_unit(s.m_dim(), rng);
        const Point y = s.anchor_y() + 0.05 * random_unit(s.n_dim(), rng);
        const BoundaryPoint z = boundary_project(s, x, y, d);
        EXPECT_LE(std::abs(s.field(z.x, z.y)), kBoundaryTolerance);
        EXPECT_NEAR(std::hypot(z.n1.norm(), z.n2.norm()), 1.0, 1e-12);
        if (d == ProjectDirection::Y) EXPECT_EQ(z.x, x);
        if (d == ProjectDirection::X) EXPECT_EQ(z.y, y);
      }
    }
  }
}

TEST(Geometry, ProjectionAlongAVanishingDirectionThrows) {
  const SymbolSpec s = make_degenerate(1, 1);
  try {
    boundary_project(s, pt({0.1}), pt({0.1}), ProjectDirection::X);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateGradient);
  }
}

TEST(Geometry, NormalsPointIntoTheDomain) {
  const SymbolSpec s = make_ball(2);
  const BoundaryPoint z = anchor_point(s);
  const double h = 1e-4;
  EXPECT_EQ(evaluate_symbol(s, z.x + h * z.n1, z.y + h * z.n2), 1);
  EXPECT_EQ(evaluate_symbol(s, z.x - h * z.n1, z.y - h * z.n2), 0);
}

TEST(Geometry, LineAngleIgnoresOrientation) {
  const Vector a = pt({1.0, 0.0});
  const Vector b = pt({0.0, 1.0});
  EXPECT_NEAR(line_angle(a, b), std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(line_angle(a, -a), 0.0, 1e-15);
  EXPECT_NEAR(line_angle(a, pt({std::cos(0.3), std::sin(0.3)})), 0.3, 1e-14);
}

TEST(Geometry, TransversalityCheck) {
  BoundaryPoint z;
  z.n1 = pt({0.6});
  z.n2 = pt({0.8});
  EXPECT_TRUE(transversality_check(z));
  z.n1 = pt({1e-9});
  EXPECT_FALSE(transversality_check(z));
}

TEST(Geometry, C1CheckSeparatesFlatAndCurvedSections) {
  Rng rng(32);
  const SymbolSpec ball = make_ball(2);
  const BoundaryPoint zb = anchor_point(ball);
  std::vector<Point> xs;
  for (int k = 0; k < 6; ++k) xs.push_back(zb.x + 0.1 * random_unit(2, rng));
  EXPECT_TRUE(zero_curvature_check_c1(ball, zb.y, xs).ok);

  const SymbolSpec sphere = make_sphere_delta(2, 0.0);
  const BoundaryPoint zs = anchor_point(sphere);
  xs.clear();
  for (int k = 0; k < 6; ++k) xs.push_back(zs.x + 0.05 * random_unit(2, rng));
  const CurvatureCheck c = zero_curvature_check_c1(sphere, zs.y, xs);
  EXPECT_FALSE(c.ok);
  ASSERT_FALSE(c.witnesses.empty());
  EXPECT_GT(c.witnesses.front().deviation, kAngleTolerance);
  // Witness pairs share y and carry different normals.
  EXPECT_EQ(c.witnesses.front().first.y, c.witnesses.front().second.y);
}

TEST(Geometry, MixedHessianCheckMatchesTheGeometry) {
  for (const SymbolSpec& flat : {make_ball(3), make_toeplitz_ball(1)}) {
    EXPECT_TRUE(mixed_hessian_check(flat, {anchor_point(flat)}).ok) << flat.id();
  }
  for (const SymbolSpec& curved : {make_toeplitz_ball(2), make_sphere_delta(2, 0.3)}) {
    const HessianCheck h = mixed_hessian_check(curved, {anchor_point(curved)});
    EXPECT_FALSE(h.ok) << curved.id();
    EXPECT_GT(h.max_violation, kHessianTolerance);
  }
}

TEST(Geometry, MixedHessianCheckRequiresSecondDerivativesWhenAsked) {
  const SymbolSpec s = make_callable_symbol(
      "plane", 1, 1, [](const Point& x, const Point& y) { return x[0] - y[0]; }, uniform_box(1, -1, 1),
      uniform_box(1, -1, 1));
  const BoundaryPoint z = make_boundary_point(s, pt({0.2}), pt({0.2}));
  try {
    mixed_hessian_check(s, {z}, kHessianTolerance, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RequiresC2);
  }
  EXPECT_TRUE(mixed_hessian_check(s, {z}).ok);
}

TEST(Geometry, NormalFormChartRoundTrips) {
  Rng rng(33);
  for (const SymbolSpec& s : {make_ball(2), make_sphere_delta(2, 0.3), make_toeplitz_ball(3)}) {
    const BoundaryPoint z = anchor_point(s);
    const NormalFormChart chart = normal_form_chart(s, z);
    for (int t = 0; t < 10; ++t) {
      const Point x = z.x + 0.02 * random_unit(s.m_dim(), rng);
      const Point y = z.y + 0.02 * random_unit(s.n_dim(), rng);
      EXPECT_LE((chart.phi_inverse(chart.phi(x)) - x).norm(), 1e-12);
      EXPECT_LE((chart.psi_inverse(chart.psi(y)) - y).norm(), 1e-9);
    }
    EXPECT_LE(chart.phi(z.x).norm(), 1e-12);
  }
}

TEST(Geometry, NormalFormHasUnitFirstCoordinate) {
  // In the normal form the boundary over x~ = 0 is x1' = y1'.
  Rng rng(34);
  for (const SymbolSpec& s : {make_ball(2), make_sphere_delta(3, 0.0)}) {
    const NormalFormChart chart = normal_form_chart(s, anchor_point(s));
    for (int t = 0; t < 10; ++t) {
      const Point yp = 0.01 * random_unit(s.n_dim(), rng);
      const Point xt = Point::Zero(s.m_dim() - 1);
      EXPECT_NEAR(chart.g(xt, yp), yp[0], 1e-9) << s.id();
      EXPECT_LE(chart.residual(xt, yp), 1e-8);
    }
  }
}

TEST(Geometry, FactorizationOfAffineAndCircleSymbols) {
  Vector a = pt({1.0, -0.4});
  Vector b = pt({0.7, 0.2});
  const SymbolSpec half = make_halfspace(a, b, 0.1);
  const FactorizationCheck f = triangular_factorization_check(
      half, [a](const Point& x) { return a.dot(x); }, [b](const Point& y) { return b.dot(y) + 0.1; }, 2000, 1);
  EXPECT_TRUE(f.ok);
  EXPECT_EQ(f.mismatches, 0);
  EXPECT_GT(f.checked, 1900);

  // On S^1 with polar angles, <X, Y> > delta iff theta_x - theta_y < acos(delta)
  // on the branch where theta_x > theta_y.
  for (double delta : {-0.5, 0.0, 0.5}) {
    const SymbolSpec circle = make_sphere_delta(1, delta);
    const double a0 = std::acos(delta);
    const FactorizationCheck c = triangular_factorization_check(
        circle, [](const Point& x) { return -std::asin(x[0]); },
        [a0](const Point& y) { return -std::asin(y[0]) - a0; }, 2000, 2, Box{{0.3, 0.98}}, Box{{-0.98, 0.2}});
    EXPECT_EQ(c.mismatches, 0) << delta;
    EXPECT_GT(c.checked, 1900);
  }
}

TEST(Geometry, FactorizationDetectsAWrongModel) {
  const SymbolSpec ball = make_ball(1);
  const FactorizationCheck f = triangular_factorization_check(
      ball, [](const Point& x) { return x[0]; }, [](const Point& y) { return y[0]; }, 500, 3);
  EXPECT_FALSE(f.ok);
  EXPECT_GT(f.mismatches, 0);
}

TEST(Geometry, ClassifyBuiltins) {
  EXPECT_EQ(classify(make_ball(2)).verdict, Verdict::TriangularModel);
  EXPECT_EQ(classify(make_toeplitz_ball(1)).verdict, Verdict::TriangularModel);
  EXPECT_EQ(classify(make_triangular()).verdict, Verdict::TriangularModel);
  EXPECT_EQ(classify(make_toeplitz_ball(2)).verdict, Verdict::CurvatureFail);
  const ClassificationReport r = classify(make_sphere_delta(2, 0.3));
  EXPECT_EQ(r.verdict, Verdict::CurvatureFail);
  EXPECT_FALSE(r.witnesses.empty());
  EXPECT_LE(static_cast<int>(r.witnesses.size()), r.options.max_witnesses);
  EXPECT_TRUE(r.c2_checked);
  EXPECT_EQ(r.disagreements, 0);
}

TEST(Geometry, ClassifyDegenerateAndNonTransverseCases) {
  const ClassificationReport d = classify(make_degenerate(2, 2));
  EXPECT_EQ(d.verdict, Verdict::TriangularModel);
  EXPECT_FALSE(d.note.empty());

  const SymbolSpec parabola =
      make_expression_symbol("y1 - x1^2", 1, 1, uniform_box(1, -1, 1), uniform_box(1, -1, 1));
  EXPECT_EQ(classify(parabola, pt({0.0}), pt({0.1})).verdict, Verdict::NonTransverse);
}

TEST(Geometry, FiniteDifferenceSymbolsClassifyLikeAnalyticOnes) {
  const SymbolSpec analytic = make_sphere_delta(2, 0.0);
  const SymbolSpec fd = make_callable_symbol("fd-sphere", 2, 2, [analytic](const Point& x, const Point& y) {
    return analytic.field(x, y);
  }, analytic.box_x(), analytic.box_y(), analytic.anchor_x(), analytic.anchor_y());
  EXPECT_EQ(classify(fd).verdict, Verdict::CurvatureFail);

  const SymbolSpec ball = make_ball(2);
  const SymbolSpec fd_ball = make_callable_symbol("fd-ball", 2, 2, [ball](const Point& x, const Point& y) {
    return ball.field(x, y);
  }, ball.box_x(), ball.box_y(), ball.anchor_x(), ball.anchor_y());
  EXPECT_EQ(classify(fd_ball).verdict, Verdict::TriangularModel);
}

TEST(Geometry, ClassifyIsDeterministicAcrossJobCounts) {
  ClassifyOptions a;
  a.seed = 5;
  ClassifyOptions b = a;
  b.jobs = 3;
  const SymbolSpec s = make_sphere_delta(2, 0.3);
  const ClassificationReport ra = classify(s, {}, {}, a);
  const ClassificationReport rb = classify(s, {}, {}, b);
  EXPECT_EQ(ra.max_angle_deviation, rb.max_angle_deviation);
  EXPECT_EQ(ra.transverse_samples, rb.transverse_samples);
  ASSERT_EQ(ra.witnesses.size(), rb.witnesses.size());
  for (std::size_t i = 0; i < ra.witnesses.size(); ++i) EXPECT_EQ(ra.witnesses[i].deviation, rb.witnesses[i].deviation);
}

TEST(Geometry, VerdictNamesRoundTrip) {
  for (Verdict v : {Verdict::TriangularModel, Verdict::CurvatureFail, Verdict::NonTransverse, Verdict::Inconclusive}) {
    EXPECT_EQ(parse_verdict(to_string(v)), v);
  }
  EXPECT_FALSE(parse_verdict("maybe").has_value());
}
