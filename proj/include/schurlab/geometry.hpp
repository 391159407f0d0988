#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schurlab/symbols.hpp"

namespace schurlab {

/// Which variables boundary_project is allowed to move.
enum class ProjectDirection { Y, X, Both };

/// Newton iteration along d_yF (or d_xF, or the full gradient) with step
/// halving until |F| <= 1e-9. Throws NoConvergence after `max_iterations`.
BoundaryPoint boundary_project(const SymbolSpec& spec, const Point& x, const Point& y_init,
                               ProjectDirection direction = ProjectDirection::Y,
                               int max_iterations = 100);

inline constexpr double kTransversalityTolerance = 1e-6;
inline constexpr double kAngleTolerance = 1e-4;
inline constexpr double kHessianTolerance = 1e-6;

bool transversality_check(const BoundaryPoint& pt, double tol = kTransversalityTolerance);

/// Angle between the lines spanned by unit vectors a and b (sign ignored).
double line_angle(const Vector& a, const Vector& b);

struct Witness {
  BoundaryPoint first;
  BoundaryPoint second;
  double deviation = 0.0;  // radians
};

struct CurvatureCheck {
  bool ok = true;
  double max_deviation = 0.0;
  std::vector<Witness> witnesses;  // pairs exceeding the tolerance, largest first
};

/// Fixes y, projects every (x_i, y) onto the boundary by moving x, and
/// compares the y-normals n2 pairwise. Throws NonTransverseSample if a
/// projected sample is not transverse.
CurvatureCheck zero_curvature_check_c1(const SymbolSpec& spec, const Point& y,
                                       const std::vector<Point>& x_samples,
                                       double tol_angle = kAngleTolerance);

/// Mirror image: fixes x and compares the x-normals n1 across y samples.
CurvatureCheck zero_curvature_check_c1_dual(const SymbolSpec& spec, const Point& x,
                                            const std::vector<Point>& y_samples,
                                            double tol_angle = kAngleTolerance);

struct HessianCheck {
  bool ok = true;
  double max_violation = 0.0;     // relative, see mixed_hessian_check
  std::vector<double> violations;  // one per input point
};

/// For each point, max |u^T H_xy v| over orthonormal bases u of ker d_xF and
/// v of ker d_yF, relative to ||H_xy||_2. Finite-difference Hessians are
/// measured against max(||H_xy||_2, 1e-5 |grad F| / (1 + |z|)) so stencil
/// noise on an exactly vanishing Hessian does not read as a violation.
/// Throws RequiresC2 when the symbol has no analytic mixed Hessian and
/// `allow_finite_difference` is false.
HessianCheck mixed_hessian_check(const SymbolSpec& spec, const std::vector<BoundaryPoint>& pts,
                                 double tol = kHessianTolerance,
                                 bool allow_finite_difference = true);

/// Local normal form around a transverse boundary point z0:
///   phi(x) = Q^T (x - x0) with Q e_1 = n1 / |n1|,
///   psi(y) = (h(0, y), P^T (y - y0)) with P an orthonormal basis of n2^perp,
/// where x1' = h(x~, y) solves F(phi^{-1}(x1', x~), y) = 0. In these
/// coordinates the boundary is {x1' = g(x~, y')} with g(0, y') = y'_1.
class NormalFormChart {
 public:
  NormalFormChart(SymbolSpec spec, const BoundaryPoint& z0);

  int m_dim() const noexcept { return static_cast<int>(x0_.size()); }
  int n_dim() const noexcept { return static_cast<int>(y0_.size()); }
  const BoundaryPoint& base() const noexcept { return base_; }

  Point phi(const Point& x) const;
  Point phi_inverse(const Point& xp) const;
  Point psi(const Point& y) const;
  Point psi_inverse(const Point& yp) const;

  /// x1' = h(x~, y) in phi coordinates with y untransformed.
  double h(const Point& x_tilde, const Point& y) const;
  /// x1' = g(x~, y'); throws NoConvergence if an implicit solve fails.
  double g(const Point& x_tilde, const Point& y_prime) const;
  /// |F| at the boundary point reconstructed from (x~, y').
  double residual(const Point& x_tilde, const Point& y_prime) const;

 private:
  SymbolSpec spec_;
  BoundaryPoint base_;
  Point x0_;
  Point y0_;
  RealMatrix q_;  // m x m orthogonal, first column n1 / |n1|
  Vector n2_unit_;
  RealMatrix p_;  // n x (n-1), orthonormal basis of n2^perp
};

NormalFormChart normal_form_chart(const SymbolSpec& spec, const BoundaryPoint& z0);

using ScalarField = std::function<double(const Point&)>;

struct FactorizationCheck {
  bool ok = true;
  int checked = 0;
  int skipped = 0;     // inside the 1e-9 band around either zero set
  int mismatches = 0;
};

/// Compares chi_Sigma(x, y) with [f1(x) > f2(y)] at uniform samples from the
/// chart box (or from the supplied sub-boxes).
FactorizationCheck triangular_factorization_check(const SymbolSpec& spec, const ScalarField& f1,
                                                  const ScalarField& f2, int samples,
                                                  std::uint64_t seed,
                                                  std::optional<Box> box_x = {},
                                                  std::optional<Box> box_y = {});

enum class Verdict { TriangularModel, CurvatureFail, NonTransverse, Inconclusive };

const char* to_string(Verdict v) noexcept;
std::optional<Verdict> parse_verdict(const std::string& s);

struct ClassifyOptions {
  int samples = 64;
  double radius_fraction = 0.1;   // sampling radius relative to box width
  double cluster_fraction = 0.05;  // C1 cluster radius relative to box width
  int cluster_size = 4;
  double angle_tol = kAngleTolerance;
  double transversality_tol = kTransversalityTolerance;
  double hessian_tol = kHessianTolerance;
  double degenerate_tol = 1e-9;
  std::uint64_t seed = 0;
  int jobs = 1;
  int max_witnesses = 8;
};

struct ClassificationReport {
  Verdict verdict = Verdict::Inconclusive;
  BoundaryPoint base;
  std::vector<Witness> witnesses;
  ClassifyOptions options;
  int samples_requested = 0;
  int samples_used = 0;        // boundary samples that projected inside the box
  int transverse_samples = 0;
  bool c2_checked = false;
  double max_angle_deviation = 0.0;
  double max_hessian_violation = 0.0;
  int disagreements = 0;       // samples where the C1 and C2 checks disagree
  std::string note;
};

/// Full verdict at a point pair z0 (the symbol's anchor when omitted).
ClassificationReport classify(const SymbolSpec& spec, std::optional<Point> x0 = {},
                              std::optional<Point> y0 = {}, const ClassifyOptions& options = {});

}  // namespace schurlab
