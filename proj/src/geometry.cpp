#include "schurlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/parallel.hpp"
#include "schurlab/random.hpp"

namespace schurlab {

namespace {

constexpr std::uint64_t kSampleStream = 0x53414D50ULL;   // "SAMP"
constexpr std::uint64_t kClusterStream = 0x434C5553ULL;  // "CLUS"
constexpr std::uint64_t kFactorStream = 0x46414354ULL;   // "FACT"

// Orthonormal basis of the complement of the unit vector a (columns).
RealMatrix complement_basis(const Vector& a) {
  const Eigen::Index k = a.size();
  if (k <= 1) return RealMatrix(k, 0);
  const RealMatrix column = a;
  Eigen::HouseholderQR<RealMatrix> qr(column);
  const RealMatrix q = qr.householderQ() * RealMatrix::Identity(k, k);
  return q.rightCols(k - 1);
}

double operator_norm(const RealMatrix& h) {
  if (h.size() == 0) return 0.0;
  Eigen::JacobiSVD<RealMatrix> svd(h);
  return svd.singularValues()[0];
}

Point uniform_in(const Box& box, Rng& rng) {
  Point p(static_cast<Eigen::Index>(box.size()));
  for (std::size_t i = 0; i < box.size(); ++i) {
    std::uniform_real_distribution<double> u(box[i].lo, box[i].hi);
    p[static_cast<Eigen::Index>(i)] = u(rng);
  }
  return p;
}

Point jitter(const Point& center, const Box& box, double fraction, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Point p = center;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    p[i] += fraction * box[static_cast<std::size_t>(i)].width() * u(rng);
  }
  return p;
}

CurvatureCheck compare_normals(const std::vector<BoundaryPoint>& pts, bool use_n2, double tol) {
  CurvatureCheck out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vector a = use_n2 ? pts[i].n2 : pts[i].n1;
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vector b = use_n2 ? pts[j].n2 : pts[j].n1;
      const double dev = line_angle(a / a.norm(), b / b.norm());
      out.max_deviation = std::max(out.max_deviation, dev);
      if (dev > tol) out.witnesses.push_back({pts[i], pts[j], dev});
    }
  }
  std::stable_sort(out.witnesses.begin(), out.witnesses.end(),
                   [](const Witness& a, const Witness& b) { return a.deviation > b.deviation; });
  out.ok = out.witnesses.empty();
  return out;
}

// Projects (samples_i, fixed) moving the sample coordinate. Throws on
// failure, or on non-transverse samples when `strict`; otherwise skips them.
std::vector<BoundaryPoint> project_family(const SymbolSpec& spec, const Point& fixed,
                                          const std::vector<Point>& samples, bool vary_x,
                                          bool strict, double transversality_tol) {
  std::vector<BoundaryPoint> pts;
  for (const Point& s : samples) {
    BoundaryPoint bp;
    if (strict) {
      bp = vary_x ? boundary_project(spec, s, fixed, ProjectDirection::X)
                  : boundary_project(spec, fixed, s, ProjectDirection::Y);
      if (!transversality_check(bp, transversality_tol)) {
        fail(ErrorKind::NonTransverseSample, "projected sample is not a transverse boundary point");
      }
    } else {
      try {
        bp = vary_x ? boundary_project(spec, s, fixed, ProjectDirection::X)
                    : boundary_project(spec, fixed, s, ProjectDirection::Y);
      } catch (const Error&) {
        continue;
      }
      if (!spec.in_domain(bp.x, bp.y) || !transversality_check(bp, transversality_tol)) continue;
    }
    pts.push_back(std::move(bp));
  }
  return pts;
}

}  // namespace

BoundaryPoint boundary_project(const SymbolSpec& spec, const Point& x, const Point& y_init,
                               ProjectDirection direction, int max_iterations) {
  Point cx = x;
  Point cy = y_init;
  double f = spec.field(cx, cy);
  if (!std::isfinite(f)) fail(ErrorKind::NonFinite, "F is not finite at the starting point");
  for (int it = 0; it <= max_iterations; ++it) {
    if (std::abs(f) <= kBoundaryTolerance) return make_boundary_point(spec, cx, cy);
    if (it == max_iterations) break;
    const Gradient g = gradient(spec, cx, cy);
    Vector dx = direction == ProjectDirection::Y ? Vector(Vector::Zero(cx.size())) : g.dx;
    Vector dy = direction == ProjectDirection::X ? Vector(Vector::Zero(cy.size())) : g.dy;
    const double dn2 = dx.squaredNorm() + dy.squaredNorm();
    if (!(dn2 >= kDegenerateGradient * kDegenerateGradient)) {
      fail(ErrorKind::DegenerateGradient, "F has no gradient along the projection direction");
    }
    const double step = -f / dn2;
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60 && !accepted; ++k, lambda *= 0.5) {
      const Point nx = cx + lambda * step * dx;
      const Point ny = cy + lambda * step * dy;
      double fn = 0.0;
      try {
        fn = spec.field(nx, ny);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::OutOfDomain) throw;
        continue;
      }
      if (std::isfinite(fn) && std::abs(fn) < std::abs(f)) {
        cx = nx;
        cy = ny;
        f = fn;
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  fail(ErrorKind::NoConvergence, "boundary projection did not reach |F| <= 1e-9 for " + spec.id());
}

bool transversality_check(const BoundaryPoint& pt, double tol) {
  const double total = std::sqrt(pt.n1.squaredNorm() + pt.n2.squaredNorm());
  return pt.n1.norm() >= tol * total && pt.n2.norm() >= tol * total;
}

double line_angle(const Vector& a, const Vector& b) {
  const double chord = std::min((a - b).norm(), (a + b).norm());
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

CurvatureCheck zero_curvature_check_c1(const SymbolSpec& spec, const Point& y,
                                       const std::vector<Point>& x_samples, double tol_angle) {
  const auto pts = project_family(spec, y, x_samples, true, true, kTransversalityTolerance);
  return compare_normals(pts, true, tol_angle);
}

CurvatureCheck zero_curvature_check_c1_dual(const SymbolSpec& spec, const Point& x,
                                            const std::vector<Point>& y_samples,
                                            double tol_angle) {
  const auto pts = project_family(spec, x, y_samples, false, true, kTransversalityTolerance);
  return compare_normals(pts, false, tol_angle);
}

HessianCheck mixed_hessian_check(const SymbolSpec& spec, const std::vector<BoundaryPoint>& pts,
                                 double tol, bool allow_finite_difference) {
  const bool analytic = spec.has_analytic_mixed_hessian();
  if (!analytic && !allow_finite_difference) {
    fail(ErrorKind::RequiresC2, "symbol " + spec.id() + " has no second derivatives");
  }
  HessianCheck out;
  for (const BoundaryPoint& pt : pts) {
    const RealMatrix h = mixed_hessian(spec, pt.x, pt.y);
    const Gradient g = gradient(spec, pt.x, pt.y);
    const RealMatrix u = complement_basis(g.dx / g.dx.norm());
    const RealMatrix v = complement_basis(g.dy / g.dy.norm());
    double violation = 0.0;
    if (u.cols() > 0 && v.cols() > 0) {
      double scale = operator_norm(h);
      if (!analytic) {
        const double z = std::sqrt(pt.x.squaredNorm() + pt.y.squaredNorm());
        scale = std::max(scale, 1e-5 * g.norm() / (1.0 + z));
      }
      if (scale > 0.0) violation = (u.transpose() * h * v).cwiseAbs().maxCoeff() / scale;
    }
    out.violations.push_back(violation);
    out.max_violation = std::max(out.max_violation, violation);
  }
  out.ok = out.max_violation <= tol;
  return out;
}

NormalFormChart::NormalFormChart(SymbolSpec spec, const BoundaryPoint& z0)
    : spec_(std::move(spec)), base_(z0), x0_(z0.x), y0_(z0.y) {
  if (z0.x.size() != spec_.m_dim() || z0.y.size() != spec_.n_dim()) {
    fail(ErrorKind::DimensionMismatch, "base point dimensions do not match the symbol");
  }
  if (!transversality_check(z0)) {
    fail(ErrorKind::NonTransverse, "normal form needs a transverse base point");
  }
  const Vector a = z0.n1 / z0.n1.norm();
  const Eigen::Index m = a.size();
  q_.resize(m, m);
  q_.col(0) = a;
  q_.rightCols(m - 1) = complement_basis(a);
  n2_unit_ = z0.n2 / z0.n2.norm();
  p_ = complement_basis(n2_unit_);
}

Point NormalFormChart::phi(const Point& x) const { return q_.transpose() * (x - x0_); }

Point NormalFormChart::phi_inverse(const Point& xp) const { return x0_ + q_ * xp; }

double NormalFormChart::h(const Point& x_tilde, const Point& y) const {
  if (x_tilde.size() != m_dim() - 1 || y.size() != n_dim()) {
    fail(ErrorKind::DimensionMismatch, "normal form coordinates have the wrong dimension");
  }
  Point xp(m_dim());
  xp[0] = 0.0;
  xp.tail(m_dim() - 1) = x_tilde;
  double f = spec_.field(phi_inverse(xp), y);
  for (int it = 0; it < 100; ++it) {
    if (std::abs(f) <= 1e-12 * (1.0 + std::abs(xp[0]))) return xp[0];
    const Gradient g = gradient(spec_, phi_inverse(xp), y);
    const double slope = g.dx.dot(q_.col(0));
    if (slope == 0.0) break;
    const double step = -f / slope;
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 60 && !accepted; ++k, lambda *= 0.5) {
      Point cand = xp;
      cand[0] += lambda * step;
      double fc = 0.0;
      try {
        fc = spec_.field(phi_inverse(cand), y);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::OutOfDomain) throw;
        continue;
      }
      if (std::abs(fc) < std::abs(f)) {
        xp = cand;
        f = fc;
        accepted = true;
      }
    }
    if (!accepted) {
      if (std::abs(f) <= kBoundaryTolerance) return xp[0];
      break;
    }
  }
  fail(ErrorKind::NoConvergence, "implicit solve for the normal form graph failed");
}

Point NormalFormChart::psi(const Point& y) const {
  Point out(n_dim());
  out[0] = h(Point::Zero(m_dim() - 1), y);
  out.tail(n_dim() - 1) = p_.transpose() * (y - y0_);
  return out;
}

Point NormalFormChart::psi_inverse(const Point& yp) const {
  if (yp.size() != n_dim()) fail(ErrorKind::DimensionMismatch, "psi_inverse input has wrong size");
  const Point zero_tilde = Point::Zero(m_dim() - 1);
  const Point base = y0_ + p_ * yp.tail(n_dim() - 1);
  double tau = 0.0;
  for (int it = 0; it < 100; ++it) {
    const Point y = base + tau * n2_unit_;
    const double s = h(zero_tilde, y);
    const double err = s - yp[0];
    if (std::abs(err) <= 1e-13 * (1.0 + std::abs(yp[0]))) return y;
    Point xp = Point::Zero(m_dim());
    xp[0] = s;
    const Gradient g = gradient(spec_, phi_inverse(xp), y);
    // Implicit differentiation of F(phi^{-1}(h, 0), y) = 0 along n2.
    const double dh = -g.dy.dot(n2_unit_) / g.dx.dot(q_.col(0));
    if (dh == 0.0 || !std::isfinite(dh)) break;
    tau -= err / dh;
  }
  fail(ErrorKind::NoConvergence, "inverting psi failed");
}

double NormalFormChart::g(const Point& x_tilde, const Point& y_prime) const {
  return h(x_tilde, psi_inverse(y_prime));
}

double NormalFormChart::residual(const Point& x_tilde, const Point& y_prime) const {
  const Point y = psi_inverse(y_prime);
  Point xp(m_dim());
  xp[0] = h(x_tilde, y);
  xp.tail(m_dim() - 1) = x_tilde;
  return std::abs(spec_.field(phi_inverse(xp), y));
}

NormalFormChart normal_form_chart(const SymbolSpec& spec, const BoundaryPoint& z0) {
  return NormalFormChart(spec, z0);
}

FactorizationCheck triangular_factorization_check(const SymbolSpec& spec, const ScalarField& f1,
                                                  const ScalarField& f2, int samples,
                                                  std::uint64_t seed, std::optional<Box> box_x,
                                                  std::optional<Box> box_y) {
  if (samples < 1) fail(ErrorKind::InvalidArgument, "samples must be positive");
  const Box bx = box_x.value_or(spec.box_x());
  const Box by = box_y.value_or(spec.box_y());
  if (static_cast<int>(bx.size()) != spec.m_dim() || static_cast<int>(by.size()) != spec.n_dim()) {
    fail(ErrorKind::DimensionMismatch, "sampling boxes do not match the symbol dimensions");
  }
  Rng rng = make_rng(seed, kFactorStream);
  FactorizationCheck out;
  for (int s = 0; s < samples; ++s) {
    const Point x = uniform_in(bx, rng);
    const Point y = uniform_in(by, rng);
    const double f = spec.field(x, y);
    const double a = f1(x);
    const double b = f2(y);
    if (std::abs(f) < 1e-9 || std::abs(a - b) < 1e-9) {
      ++out.skipped;
      continue;
    }
    ++out.checked;
    if ((f > 0.0) != (a > b)) ++out.mismatches;
  }
  out.ok = out.mismatches == 0;
  return out;
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::TriangularModel: return "TRIANGULAR_MODEL";
    case Verdict::CurvatureFail: return "CURVATURE_FAIL";
    case Verdict::NonTransverse: return "NON_TRANSVERSE";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

std::optional<Verdict> parse_verdict(const std::string& s) {
  for (Verdict v : {Verdict::TriangularModel, Verdict::CurvatureFail, Verdict::NonTransverse,
                    Verdict::Inconclusive}) {
    if (s == to_string(v)) return v;
  }
  return std::nullopt;
}

namespace {

BoundaryPoint project_base(const SymbolSpec& spec, const Point& x, const Point& y) {
  // Starts at (x, y); if F has no usable gradient there, retries from a fixed
  // sequence of nearby points.
  for (int attempt = 0; attempt < 9; ++attempt) {
    Point sx = x;
    Point sy = y;
    if (attempt > 0) {
      const double r = 0.04 * attempt;
      for (Eigen::Index i = 0; i < sx.size(); ++i) {
        sx[i] += r * spec.box_x()[static_cast<std::size_t>(i)].width() * std::cos(1.7 * attempt + 2.3 * i);
      }
      for (Eigen::Index i = 0; i < sy.size(); ++i) {
        sy[i] += r * spec.box_y()[static_cast<std::size_t>(i)].width() * std::sin(0.9 * attempt + 1.1 * i);
      }
      if (!spec.in_domain(sx, sy)) continue;
    }
    for (ProjectDirection d : {ProjectDirection::Y, ProjectDirection::X, ProjectDirection::Both}) {
      try {
        return boundary_project(spec, sx, sy, d);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateGradient && e.kind() != ErrorKind::NoConvergence) throw;
      }
    }
  }
  return boundary_project(spec, x, y, ProjectDirection::Both);
}

struct SampleResult {
  bool valid = false;
  BoundaryPoint point;
  bool transverse = false;
  CurvatureCheck c1;
  double c2_violation = 0.0;
};

}  // namespace

ClassificationReport classify(const SymbolSpec& spec, std::optional<Point> x0,
                              std::optional<Point> y0, const ClassifyOptions& options) {
  if (options.samples < 1) fail(ErrorKind::InvalidArgument, "samples must be positive");
  const Point start_x = x0.value_or(spec.anchor_x());
  const Point start_y = y0.value_or(spec.anchor_y());
  if (!spec.in_domain(start_x, start_y)) {
    fail(ErrorKind::OutOfDomain, "classification start point lies outside the chart box");
  }
  ClassificationReport report;
  report.options = options;
  report.samples_requested = options.samples;
  report.base = project_base(spec, start_x, start_y);
  const bool base_transverse = transversality_check(report.base, options.transversality_tol);
  const bool want_c2 = spec.has_analytic_mixed_hessian();
  report.c2_checked = base_transverse && want_c2;

  std::vector<SampleResult> results(static_cast<std::size_t>(options.samples));
  parallel_for(results.size(), options.jobs, [&](std::size_t i) {
    Rng rng = make_rng(options.seed, kSampleStream, i);
    SampleResult& r = results[i];
    const Point sx = jitter(report.base.x, spec.box_x(), options.radius_fraction, rng);
    const Point sy = jitter(report.base.y, spec.box_y(), options.radius_fraction, rng);
    try {
      r.point = boundary_project(spec, sx, sy, ProjectDirection::Both);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::DimensionMismatch) throw;
      return;
    }
    if (!spec.in_domain(r.point.x, r.point.y)) return;
    r.valid = true;
    r.transverse = transversality_check(r.point, options.transversality_tol);
    if (!base_transverse || !r.transverse) return;

    Rng cluster_rng = make_rng(options.seed, kClusterStream, i);
    std::vector<Point> xs{r.point.x};
    std::vector<Point> ys{r.point.y};
    for (int k = 0; k < options.cluster_size; ++k) {
      xs.push_back(jitter(r.point.x, spec.box_x(), options.cluster_fraction, cluster_rng));
      ys.push_back(jitter(r.point.y, spec.box_y(), options.cluster_fraction, cluster_rng));
    }
    const auto px = project_family(spec, r.point.y, xs, true, false, options.transversality_tol);
    const auto py = project_family(spec, r.point.x, ys, false, false, options.transversality_tol);
    CurvatureCheck a = compare_normals(px, true, options.angle_tol);
    CurvatureCheck b = compare_normals(py, false, options.angle_tol);
    r.c1.max_deviation = std::max(a.max_deviation, b.max_deviation);
    r.c1.witnesses = std::move(a.witnesses);
    r.c1.witnesses.insert(r.c1.witnesses.end(), b.witnesses.begin(), b.witnesses.end());
    r.c1.ok = r.c1.witnesses.empty();
    if (want_c2) r.c2_violation = mixed_hessian_check(spec, {r.point}, options.hessian_tol).max_violation;
  });

  bool all_n1_zero = true;
  bool all_n2_zero = true;
  bool any_fail = false;
  for (const SampleResult& r : results) {
    if (!r.valid) continue;
    ++report.samples_used;
    all_n1_zero = all_n1_zero && r.point.n1.norm() < options.degenerate_tol;
    all_n2_zero = all_n2_zero && r.point.n2.norm() < options.degenerate_tol;
    if (!base_transverse || !r.transverse) continue;
    ++report.transverse_samples;
    report.max_angle_deviation = std::max(report.max_angle_deviation, r.c1.max_deviation);
    report.max_hessian_violation = std::max(report.max_hessian_violation, r.c2_violation);
    const bool c1_fail = !r.c1.ok;
    const bool c2_fail = r.c2_violation > options.hessian_tol;
    if (want_c2 && c1_fail != c2_fail) ++report.disagreements;
    any_fail = any_fail || c1_fail || c2_fail;
    report.witnesses.insert(report.witnesses.end(), r.c1.witnesses.begin(), r.c1.witnesses.end());
  }
  std::stable_sort(report.witnesses.begin(), report.witnesses.end(),
                   [](const Witness& a, const Witness& b) { return a.deviation > b.deviation; });
  if (static_cast<int>(report.witnesses.size()) > options.max_witnesses) {
    report.witnesses.resize(static_cast<std::size_t>(std::max(0, options.max_witnesses)));
  }

  if (!base_transverse) {
    if (report.samples_used > 0 && (all_n1_zero || all_n2_zero)) {
      report.verdict = Verdict::TriangularModel;
      report.note = all_n1_zero ? "n1 vanishes at every sampled boundary point"
                                : "n2 vanishes at every sampled boundary point";
    } else {
      report.verdict = Verdict::NonTransverse;
      report.note = "base point is not transverse";
    }
    return report;
  }
  if (report.disagreements > 0) {
    report.verdict = Verdict::Inconclusive;
    report.note = "C1 and C2 curvature checks disagree at " + std::to_string(report.disagreements) +
                  " samples";
  } else if (any_fail) {
    report.verdict = report.witnesses.empty() ? Verdict::Inconclusive : Verdict::CurvatureFail;
    if (report.witnesses.empty()) report.note = "curvature violation without an angle witness";
  } else if (report.transverse_samples == 0) {
    report.verdict = Verdict::Inconclusive;
    report.note = "no transverse boundary samples near the base point";
  } else {
    report.verdict = Verdict::TriangularModel;
  }
  return report;
}

}  // namespace schurlab
