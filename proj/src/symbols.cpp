#include "schurlab/symbols.hpp"

#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/expr.hpp"

namespace schurlab {

const char* to_string(Builtin b) noexcept {
  switch (b) {
    case Builtin::Ball: return "ball";
    case Builtin::Halfspace: return "halfspace";
    case Builtin::ToeplitzBall: return "toeplitz_ball";
    case Builtin::SphereDelta: return "sphere_delta";
    case Builtin::Triangular: return "triangular";
    case Builtin::Degenerate: return "degenerate";
  }
  return "unknown";
}

Box uniform_box(int dim, double lo, double hi) {
  return Box(static_cast<std::size_t>(dim), Interval{lo, hi});
}

Point box_center(const Box& box) {
  Point c(static_cast<Eigen::Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) c[static_cast<Eigen::Index>(i)] = 0.5 * (box[i].lo + box[i].hi);
  return c;
}

bool box_contains(const Box& box, const Point& p) {
  if (p.size() != static_cast<Eigen::Index>(box.size())) return false;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!box[i].contains(p[static_cast<Eigen::Index>(i)])) return false;
  }
  return true;
}

namespace {

void check_box(const Box& box, int dim, const char* which) {
  if (static_cast<int>(box.size()) != dim) {
    fail(ErrorKind::DimensionMismatch, std::string(which) + " box has " + std::to_string(box.size()) +
                                           " intervals, expected " + std::to_string(dim));
  }
  for (const Interval& iv : box) {
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
      fail(ErrorKind::InvalidArgument, std::string(which) + " box has an empty or infinite interval");
    }
  }
}

}  // namespace

SymbolSpec::SymbolSpec(Parts parts) : parts_(std::move(parts)) {
  if (parts_.m_dim < 1 || parts_.n_dim < 1) {
    fail(ErrorKind::InvalidArgument, "chart dimensions must be positive");
  }
  if (!parts_.field) fail(ErrorKind::InvalidArgument, "symbol needs a field F");
  check_box(parts_.box_x, parts_.m_dim, "x");
  check_box(parts_.box_y, parts_.n_dim, "y");
  if (parts_.anchor_x.size() == 0) parts_.anchor_x = box_center(parts_.box_x);
  if (parts_.anchor_y.size() == 0) parts_.anchor_y = box_center(parts_.box_y);
  if (parts_.anchor_x.size() != parts_.m_dim || parts_.anchor_y.size() != parts_.n_dim) {
    fail(ErrorKind::DimensionMismatch, "anchor point dimensions do not match the chart");
  }
}

void SymbolSpec::check_dims(const Point& x, const Point& y) const {
  if (x.size() != parts_.m_dim || y.size() != parts_.n_dim) {
    fail(ErrorKind::DimensionMismatch,
         "symbol " + parts_.id + " expects points in R^" + std::to_string(parts_.m_dim) + " x R^" +
             std::to_string(parts_.n_dim));
  }
}

double SymbolSpec::field(const Point& x, const Point& y) const {
  check_dims(x, y);
  return parts_.field(x, y);
}

bool SymbolSpec::in_domain(const Point& x, const Point& y) const {
  return box_contains(parts_.box_x, x) && box_contains(parts_.box_y, y);
}

int evaluate_symbol(const SymbolSpec& spec, const Point& x, const Point& y) {
  if (!spec.in_domain(x, y)) {
    fail(ErrorKind::OutOfDomain, "point outside the chart box of " + spec.id());
  }
  return spec.field(x, y) > 0.0 ? 1 : 0;
}

Gradient finite_difference_gradient(const SymbolSpec& spec, const Point& x, const Point& y,
                                    double relative_step) {
  const double h = relative_step * (1.0 + std::sqrt(x.squaredNorm() + y.squaredNorm()));
  Gradient g{Vector(x.size()), Vector(y.size())};
  Point xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + h;
    const double fp = spec.field(xp, y);
    xp[j] = x[j] - h;
    const double fm = spec.field(xp, y);
    xp[j] = x[j];
    g.dx[j] = (fp - fm) / (2.0 * h);
  }
  Point yp = y;
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    yp[k] = y[k] + h;
    const double fp = spec.field(x, yp);
    yp[k] = y[k] - h;
    const double fm = spec.field(x, yp);
    yp[k] = y[k];
    g.dy[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Gradient gradient(const SymbolSpec& spec, const Point& x, const Point& y) {
  Gradient g;
  if (spec.has_analytic_gradient()) {
    if (x.size() != spec.m_dim() || y.size() != spec.n_dim()) {
      fail(ErrorKind::DimensionMismatch, "gradient point dimensions do not match " + spec.id());
    }
    g = spec.parts().gradient(x, y);
  } else {
    g = finite_difference_gradient(spec, x, y);
  }
  if (!(g.norm() >= kDegenerateGradient)) {
    fail(ErrorKind::DegenerateGradient, "gradient of " + spec.id() + " vanishes (not a submersion point)");
  }
  return g;
}

RealMatrix finite_difference_mixed_hessian(const SymbolSpec& spec, const Point& x, const Point& y,
                                           double relative_step) {
  const double h = relative_step * (1.0 + std::sqrt(x.squaredNorm() + y.squaredNorm()));
  RealMatrix hess(x.size(), y.size());
  Point xp = x;
  Point yp = y;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    for (Eigen::Index k = 0; k < y.size(); ++k) {
      xp[j] = x[j] + h;
      yp[k] = y[k] + h;
      const double fpp = spec.field(xp, yp);
      yp[k] = y[k] - h;
      const double fpm = spec.field(xp, yp);
      xp[j] = x[j] - h;
      const double fmm = spec.field(xp, yp);
      yp[k] = y[k] + h;
      const double fmp = spec.field(xp, yp);
      xp[j] = x[j];
      yp[k] = y[k];
      hess(j, k) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return hess;
}

RealMatrix mixed_hessian(const SymbolSpec& spec, const Point& x, const Point& y) {
  if (!spec.in_domain(x, y)) {
    fail(ErrorKind::OutOfDomain, "mixed Hessian requested outside the chart box of " + spec.id());
  }
  if (spec.has_analytic_mixed_hessian()) return spec.parts().mixed_hessian(x, y);
  return finite_difference_mixed_hessian(spec, x, y);
}

BoundaryPoint make_boundary_point(const SymbolSpec& spec, const Point& x, const Point& y) {
  const Gradient g = gradient(spec, x, y);
  const double n = g.norm();
  return BoundaryPoint{x, y, g.dx / n, g.dy / n, std::abs(spec.field(x, y))};
}

SymbolSpec transpose(const SymbolSpec& spec) {
  const SymbolSpec::Parts& p = spec.parts();
  SymbolSpec::Parts t;
  t.id = "transpose(" + p.id + ")";
  t.m_dim = p.n_dim;
  t.n_dim = p.m_dim;
  t.field = [f = p.field](const Point& x, const Point& y) { return f(y, x); };
  if (p.gradient) {
    t.gradient = [g = p.gradient](const Point& x, const Point& y) {
      Gradient inner = g(y, x);
      return Gradient{std::move(inner.dy), std::move(inner.dx)};
    };
  }
  if (p.mixed_hessian) {
    t.mixed_hessian = [h = p.mixed_hessian](const Point& x, const Point& y) {
      return RealMatrix(h(y, x).transpose());
    };
  }
  t.box_x = p.box_y;
  t.box_y = p.box_x;
  t.builtin = p.builtin;
  t.anchor_x = p.anchor_y;
  t.anchor_y = p.anchor_x;
  return SymbolSpec(std::move(t));
}

SymbolSpec make_expression_symbol(const std::string& expression, int m_dim, int n_dim, Box box_x,
                                  Box box_y, std::optional<Point> anchor_x,
                                  std::optional<Point> anchor_y) {
  if (m_dim < 1 || n_dim < 1) fail(ErrorKind::InvalidArgument, "chart dimensions must be positive");
  const Expression f = Expression::parse(expression, product_chart_variables(m_dim, n_dim));
  const auto m = static_cast<std::size_t>(m_dim);
  const auto n = static_cast<std::size_t>(n_dim);
  std::vector<Expression> first;
  for (std::size_t i = 0; i < m + n; ++i) first.push_back(f.derivative(i));
  std::vector<Expression> second;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < n; ++k) second.push_back(first[j].derivative(m + k));
  }
  const auto pack = [m_dim, n_dim](const Point& x, const Point& y) {
    std::vector<double> in(static_cast<std::size_t>(m_dim + n_dim));
    for (int i = 0; i < m_dim; ++i) in[static_cast<std::size_t>(i)] = x[i];
    for (int i = 0; i < n_dim; ++i) in[static_cast<std::size_t>(m_dim + i)] = y[i];
    return in;
  };
  SymbolSpec::Parts parts;
  parts.id = "expr(" + expression + ")";
  parts.m_dim = m_dim;
  parts.n_dim = n_dim;
  parts.field = [f, pack](const Point& x, const Point& y) { return f.evaluate(pack(x, y)); };
  parts.gradient = [first, pack, m_dim, n_dim](const Point& x, const Point& y) {
    const auto in = pack(x, y);
    Gradient g{Vector(m_dim), Vector(n_dim)};
    for (int i = 0; i < m_dim; ++i) g.dx[i] = first[static_cast<std::size_t>(i)].evaluate(in);
    for (int i = 0; i < n_dim; ++i) g.dy[i] = first[static_cast<std::size_t>(m_dim + i)].evaluate(in);
    return g;
  };
  parts.mixed_hessian = [second, pack, m_dim, n_dim](const Point& x, const Point& y) {
    const auto in = pack(x, y);
    RealMatrix h(m_dim, n_dim);
    for (int j = 0; j < m_dim; ++j) {
      for (int k = 0; k < n_dim; ++k) {
        h(j, k) = second[static_cast<std::size_t>(j * n_dim + k)].evaluate(in);
      }
    }
    return h;
  };
  parts.box_x = std::move(box_x);
  parts.box_y = std::move(box_y);
  if (anchor_x) parts.anchor_x = *anchor_x;
  if (anchor_y) parts.anchor_y = *anchor_y;
  return SymbolSpec(std::move(parts));
}

SymbolSpec make_callable_symbol(std::string id, int m_dim, int n_dim, SymbolSpec::Field field,
                                Box box_x, Box box_y, std::optional<Point> anchor_x,
                                std::optional<Point> anchor_y) {
  SymbolSpec::Parts parts;
  parts.id = std::move(id);
  parts.m_dim = m_dim;
  parts.n_dim = n_dim;
  parts.field = std::move(field);
  parts.box_x = std::move(box_x);
  parts.box_y = std::move(box_y);
  if (anchor_x) parts.anchor_x = *anchor_x;
  if (anchor_y) parts.anchor_y = *anchor_y;
  return SymbolSpec(std::move(parts));
}

}  // namespace schurlab
