#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schurlab/matcore.hpp"

namespace schurlab {

using Point = Eigen::VectorXd;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

/// Axis-aligned bounding box of the chart, one interval per coordinate.
using Box = std::vector<Interval>;

/// Split gradient (d_x F, d_y F).
struct Gradient {
  Vector dx;
  Vector dy;

  double norm() const { return std::sqrt(dx.squaredNorm() + dy.squaredNorm()); }
};

enum class Builtin { Ball, Halfspace, ToeplitzBall, SphereDelta, Triangular, Degenerate };

const char* to_string(Builtin b) noexcept;

/// Idempotent symbol chi_Sigma with Sigma = {F > 0} on a product chart
/// R^m x R^n. Immutable once built; copies share nothing mutable.
class SymbolSpec {
 public:
  using Field = std::function<double(const Point&, const Point&)>;
  using GradientField = std::function<Gradient(const Point&, const Point&)>;
  using MixedHessianField = std::function<RealMatrix(const Point&, const Point&)>;

  struct Parts {
    std::string id;
    int m_dim = 1;
    int n_dim = 1;
    Field field;
    GradientField gradient;          // optional: analytic d_x F, d_y F
    MixedHessianField mixed_hessian;  // optional: analytic (d_xj d_yk F)
    Box box_x;
    Box box_y;
    std::optional<Builtin> builtin;
    Point anchor_x;  // a point near the boundary; default start for classification
    Point anchor_y;
  };

  explicit SymbolSpec(Parts parts);

  const std::string& id() const noexcept { return parts_.id; }
  int m_dim() const noexcept { return parts_.m_dim; }
  int n_dim() const noexcept { return parts_.n_dim; }
  const Box& box_x() const noexcept { return parts_.box_x; }
  const Box& box_y() const noexcept { return parts_.box_y; }
  std::optional<Builtin> builtin() const noexcept { return parts_.builtin; }
  const Point& anchor_x() const noexcept { return parts_.anchor_x; }
  const Point& anchor_y() const noexcept { return parts_.anchor_y; }

  bool has_analytic_gradient() const noexcept { return static_cast<bool>(parts_.gradient); }
  bool has_analytic_mixed_hessian() const noexcept {
    return static_cast<bool>(parts_.mixed_hessian);
  }

  /// Raw F without the box check (dimension checked).
  double field(const Point& x, const Point& y) const;
  bool in_domain(const Point& x, const Point& y) const;

  const Parts& parts() const noexcept { return parts_; }

 private:
  void check_dims(const Point& x, const Point& y) const;

  Parts parts_;
};

/// (n1, n2): normalized gradient at a boundary point, pointing into Sigma.
struct BoundaryPoint {
  Point x;
  Point y;
  Vector n1;
  Vector n2;
  double residual = 0.0;  // |F(x, y)|
};

inline constexpr double kBoundaryTolerance = 1e-9;
inline constexpr double kDegenerateGradient = 1e-12;

/// 1 iff F(x, y) > 0; throws OutOfDomain outside the chart box.
int evaluate_symbol(const SymbolSpec& spec, const Point& x, const Point& y);

/// Analytic gradient when available, else central differences with step
/// 1e-5 * (1 + |(x, y)|). Throws DegenerateGradient if |grad F| < 1e-12.
Gradient gradient(const SymbolSpec& spec, const Point& x, const Point& y);

/// Central-difference gradient regardless of analytic availability.
Gradient finite_difference_gradient(const SymbolSpec& spec, const Point& x, const Point& y,
                                    double relative_step = 1e-5);

/// m x n matrix of d_xj d_yk F; analytic when available, else second-order
/// central differences.
RealMatrix mixed_hessian(const SymbolSpec& spec, const Point& x, const Point& y);

/// Four-point central-difference stencil for the mixed Hessian.
RealMatrix finite_difference_mixed_hessian(const SymbolSpec& spec, const Point& x, const Point& y,
                                           double relative_step = 1e-4);

/// Boundary point record at (x, y); does not move the point.
BoundaryPoint make_boundary_point(const SymbolSpec& spec, const Point& x, const Point& y);

/// Symbol with the two factors exchanged: F'(y, x) = F(x, y).
SymbolSpec transpose(const SymbolSpec& spec);

// Builtins. Every builtin carries exact analytic first and mixed second
// derivatives.

/// |x|^2 + |y|^2 < R^2 in R^n x R^n.
SymbolSpec make_ball(int n, double radius = 1.0);

/// <a, x> - <b, y> > c, i.e. f1(x) > f2(y) for affine f1, f2.
SymbolSpec make_halfspace(const Vector& a, const Vector& b, double offset = 0.0);

/// |x - y| < R: the Toeplitz ball symbol {x - y in Omega}.
SymbolSpec make_toeplitz_ball(int n, double radius = 1.0);

/// <X, Y> > delta on S^n x S^n in orthographic hemisphere charts
/// t -> (t, sign * sqrt(1 - |t|^2)).
SymbolSpec make_sphere_delta(int n, double delta, int x_sign = 1, int y_sign = 1);

/// x - y + offset > 0 on the index line; on grids 1..N with offset 1/2 this
/// is chi_{j >= k}.
SymbolSpec make_triangular(double offset = 0.5, double extent = 1024.0);

/// |y| < R with no dependence on x (n1 identically zero).
SymbolSpec make_degenerate(int m, int n, double radius = 0.5);

/// Symbol F given by an expression in x1..xm, y1..yn. Gradient and mixed
/// Hessian come from symbolic differentiation of the expression.
SymbolSpec make_expression_symbol(const std::string& expression, int m_dim, int n_dim,
                                  Box box_x, Box box_y, std::optional<Point> anchor_x = {},
                                  std::optional<Point> anchor_y = {});

/// Symbol backed by an arbitrary callable without derivatives (finite
/// differences are used).
SymbolSpec make_callable_symbol(std::string id, int m_dim, int n_dim, SymbolSpec::Field field,
                                Box box_x, Box box_y, std::optional<Point> anchor_x = {},
                                std::optional<Point> anchor_y = {});

/// Orthographic hemisphere chart point t -> (t, sign * sqrt(1 - |t|^2)).
Vector sphere_chart_point(const Point& t, int sign);

Box uniform_box(int dim, double lo, double hi);
Point box_center(const Box& box);
bool box_contains(const Box& box, const Point& p);

}  // namespace schurlab
