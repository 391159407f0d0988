#include <cmath>
#include <cstdio>
#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/symbols.hpp"

namespace schurlab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void require_dim(int n, const char* what) {
  if (n < 1) fail(ErrorKind::InvalidArgument, std::string(what) + " dimension must be positive");
}

void require_positive(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    fail(ErrorKind::InvalidArgument, std::string(what) + " must be positive and finite");
  }
}

// Fixed generic unit direction in R^n so anchors avoid coordinate symmetries.
Vector generic_direction(int n, int salt) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = std::cos(1.3 + 0.71 * i + 2.17 * salt) + 0.3;
  return v / v.norm();
}

double orthographic_height(const Point& t) {
  const double r2 = t.squaredNorm();
  if (!(r2 < 1.0)) {
    fail(ErrorKind::OutOfDomain, "orthographic chart point outside the open unit ball");
  }
  return std::sqrt(1.0 - r2);
}

}  // namespace

Vector sphere_chart_point(const Point& t, int sign) {
  Vector p(t.size() + 1);
  p.head(t.size()) = t;
  p[t.size()] = (sign >= 0 ? 1.0 : -1.0) * orthographic_height(t);
  return p;
}

SymbolSpec make_ball(int n, double radius) {
  require_dim(n, "ball");
  require_positive(radius, "ball radius");
  SymbolSpec::Parts p;
  p.id = "ball(n=" + std::to_string(n) + ",R=" + num(radius) + ")";
  p.m_dim = p.n_dim = n;
  const double r2 = radius * radius;
  p.field = [r2](const Point& x, const Point& y) { return r2 - x.squaredNorm() - y.squaredNorm(); };
  p.gradient = [](const Point& x, const Point& y) { return Gradient{-2.0 * x, -2.0 * y}; };
  p.mixed_hessian = [n](const Point&, const Point&) { return RealMatrix(RealMatrix::Zero(n, n)); };
  p.box_x = p.box_y = uniform_box(n, -1.2 * radius, 1.2 * radius);
  p.builtin = Builtin::Ball;
  p.anchor_x = 0.5 * radius * generic_direction(n, 0);
  p.anchor_y = 0.6 * radius * generic_direction(n, 1);
  return SymbolSpec(std::move(p));
}

SymbolSpec make_halfspace(const Vector& a, const Vector& b, double offset) {
  if (a.size() < 1 || b.size() < 1) fail(ErrorKind::InvalidArgument, "halfspace needs nonempty a, b");
  if (!a.allFinite() || !b.allFinite() || !std::isfinite(offset)) {
    fail(ErrorKind::NonFinite, "halfspace coefficients must be finite");
  }
  SymbolSpec::Parts p;
  p.id = "halfspace(m=" + std::to_string(a.size()) + ",n=" + std::to_string(b.size()) + ",c=" + num(offset) + ")";
  p.m_dim = static_cast<int>(a.size());
  p.n_dim = static_cast<int>(b.size());
  p.field = [a, b, offset](const Point& x, const Point& y) { return a.dot(x) - b.dot(y) - offset; };
  p.gradient = [a, b](const Point&, const Point&) { return Gradient{a, -b}; };
  const auto m = a.size();
  const auto n = b.size();
  p.mixed_hessian = [m, n](const Point&, const Point&) { return RealMatrix(RealMatrix::Zero(m, n)); };
  p.box_x = uniform_box(p.m_dim, -1.0, 1.0);
  p.box_y = uniform_box(p.n_dim, -1.0, 1.0);
  p.builtin = Builtin::Halfspace;
  p.anchor_x = 0.3 * generic_direction(p.m_dim, 2);
  p.anchor_y = 0.2 * generic_direction(p.n_dim, 3);
  return SymbolSpec(std::move(p));
}

SymbolSpec make_toeplitz_ball(int n, double radius) {
  require_dim(n, "toeplitz_ball");
  require_positive(radius, "toeplitz_ball radius");
  SymbolSpec::Parts p;
  p.id = "toeplitz_ball(n=" + std::to_string(n) + ",R=" + num(radius) + ")";
  p.m_dim = p.n_dim = n;
  const double r2 = radius * radius;
  p.field = [r2](const Point& x, const Point& y) { return r2 - (x - y).squaredNorm(); };
  p.gradient = [](const Point& x, const Point& y) {
    const Vector d = x - y;
    return Gradient{-2.0 * d, 2.0 * d};
  };
  p.mixed_hessian = [n](const Point&, const Point&) {
    return RealMatrix(2.0 * RealMatrix::Identity(n, n));
  };
  p.box_x = p.box_y = uniform_box(n, -1.5 * radius, 1.5 * radius);
  p.builtin = Builtin::ToeplitzBall;
  p.anchor_x = 0.2 * radius * generic_direction(n, 4);
  p.anchor_y = -0.3 * radius * generic_direction(n, 5);
  return SymbolSpec(std::move(p));
}

SymbolSpec make_sphere_delta(int n, double delta, int x_sign, int y_sign) {
  require_dim(n, "sphere_delta");
  if (!(delta > -1.0 && delta < 1.0)) {
    fail(ErrorKind::InvalidArgument, "sphere_delta needs -1 < delta < 1");
  }
  const double sx = x_sign >= 0 ? 1.0 : -1.0;
  const double sy = y_sign >= 0 ? 1.0 : -1.0;
  SymbolSpec::Parts p;
  p.id = "sphere_delta(n=" + std::to_string(n) + ",delta=" + num(delta) +
         (sx < 0 || sy < 0 ? ",signs=" + num(sx) + "/" + num(sy) : std::string()) + ")";
  p.m_dim = p.n_dim = n;
  p.field = [sx, sy, delta](const Point& t, const Point& u) {
    return t.dot(u) + sx * sy * orthographic_height(t) * orthographic_height(u) - delta;
  };
  // d/dt_j X(t) = e_j - s t_j / w e_{n+1}, with w the chart height.
  p.gradient = [sx, sy](const Point& t, const Point& u) {
    const double wt = orthographic_height(t);
    const double wu = orthographic_height(u);
    const double c = sx * sy;
    return Gradient{u - c * (wu / wt) * t, t - c * (wt / wu) * u};
  };
  p.mixed_hessian = [sx, sy, n](const Point& t, const Point& u) {
    const double wt = orthographic_height(t);
    const double wu = orthographic_height(u);
    RealMatrix h = RealMatrix::Identity(n, n);
    h += (sx * sy / (wt * wu)) * t * u.transpose();
    return h;
  };
  const double half = 0.98 / std::sqrt(static_cast<double>(n));
  p.box_x = p.box_y = uniform_box(n, -half, half);
  p.builtin = Builtin::SphereDelta;

  // Anchor: X0 in the x chart, Y0 = cos(a) X0 + sin(a) W with cos(a) = delta
  // and W a unit vector orthogonal to X0, chosen so Y0 lands in the y chart.
  const double angle = std::acos(delta);
  bool found = false;
  // First choice: X0 and Y0 placed symmetrically about the pole along a
  // generic direction e, at half the angle each.
  {
    Vector e = Vector::Ones(n) + 0.1 * generic_direction(n, 6);
    e.normalize();
    const Point t0 = std::sin(0.5 * angle) * e;
    if (sx == sy && t0.cwiseAbs().maxCoeff() <= 0.9 * half) {
      p.anchor_x = t0;
      p.anchor_y = -t0;
      found = true;
    }
    // Opposite hemispheres: Y0 is the mirror image of X0 in the equator, so
    // <X0, Y0> = 2 |t0|^2 - 1.
    const Point t1 = std::sqrt(0.5 * (1.0 + delta)) * e;
    if (sx != sy && t1.cwiseAbs().maxCoeff() <= 0.9 * half) {
      p.anchor_x = t1;
      p.anchor_y = t1;
      found = true;
    }
  }
  for (int attempt = 0; attempt < 64 && !found; ++attempt) {
    const Point t0 = 0.6 * half * generic_direction(n, 6 + attempt) *
                     (attempt % 2 == 0 ? 1.0 : -1.0);
    const Vector X0 = sphere_chart_point(t0, x_sign);
    for (int k = 0; k < 2 * (n + 1) && !found; ++k) {
      Vector v = Vector::Zero(n + 1);
      v[k / 2] = k % 2 == 0 ? 1.0 : -1.0;
      v += 0.2 * generic_direction(n + 1, 40 + k);
      v -= v.dot(X0) * X0;
      if (v.norm() < 1e-6) continue;
      const Vector Y0 = std::cos(angle) * X0 + std::sin(angle) * (v / v.norm());
      if (Y0[n] * sy <= 0.05) continue;
      const Point u0 = Y0.head(n);
      if (!box_contains(p.box_y, u0) || u0.cwiseAbs().maxCoeff() > 0.9 * half) continue;
      p.anchor_x = t0;
      p.anchor_y = u0;
      found = true;
    }
  }
  if (!found) fail(ErrorKind::InvalidArgument, "no boundary point of " + p.id + " inside the chart box");
  return SymbolSpec(std::move(p));
}

SymbolSpec make_triangular(double offset, double extent) {
  require_positive(extent, "triangular extent");
  SymbolSpec::Parts p;
  p.id = "triangular(offset=" + num(offset) + ")";
  p.m_dim = p.n_dim = 1;
  p.field = [offset](const Point& x, const Point& y) { return x[0] - y[0] + offset; };
  p.gradient = [](const Point&, const Point&) {
    return Gradient{Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)};
  };
  p.mixed_hessian = [](const Point&, const Point&) { return RealMatrix(RealMatrix::Zero(1, 1)); };
  p.box_x = p.box_y = uniform_box(1, 0.0, extent);
  p.builtin = Builtin::Triangular;
  p.anchor_x = Point::Constant(1, 0.37 * extent);
  p.anchor_y = Point::Constant(1, 0.37 * extent + offset + 0.01 * extent);
  return SymbolSpec(std::move(p));
}

SymbolSpec make_degenerate(int m, int n, double radius) {
  require_dim(m, "degenerate");
  require_dim(n, "degenerate");
  require_positive(radius, "degenerate radius");
  SymbolSpec::Parts p;
  p.id = "degenerate(m=" + std::to_string(m) + ",n=" + std::to_string(n) + ",R=" + num(radius) + ")";
  p.m_dim = m;
  p.n_dim = n;
  const double r2 = radius * radius;
  p.field = [r2](const Point&, const Point& y) { return r2 - y.squaredNorm(); };
  p.gradient = [m](const Point&, const Point& y) { return Gradient{Vector::Zero(m), -2.0 * y}; };
  p.mixed_hessian = [m, n](const Point&, const Point&) { return RealMatrix(RealMatrix::Zero(m, n)); };
  p.box_x = uniform_box(m, -1.0, 1.0);
  p.box_y = uniform_box(n, -2.0 * radius, 2.0 * radius);
  p.builtin = Builtin::Degenerate;
  p.anchor_x = 0.1 * generic_direction(m, 7);
  p.anchor_y = 0.7 * radius * generic_direction(n, 8);
  return SymbolSpec(std::move(p));
}

}  // namespace schurlab
