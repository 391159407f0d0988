#include "schurlab/multiplier.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <string>

#include "schurlab/errors.hpp"

namespace schurlab {

namespace {

constexpr std::array<int, 24> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                         41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

void require_square_weights(const Matrix& x, const Vector& phi, const Vector& psi) {
  if (phi.size() != x.rows() || psi.size() != x.cols()) {
    fail(ErrorKind::ShapeMismatch, "weight lengths do not match the matrix shape");
  }
  if (!phi.allFinite() || !psi.allFinite()) fail(ErrorKind::NonFinite, "weights must be finite");
  if ((phi.array() < 0.0).any() || (psi.array() < 0.0).any()) {
    fail(ErrorKind::NegativeWeight, "compression weights must be nonnegative");
  }
}

Vector weight_power(const Vector& w, double p) {
  Vector out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::isinf(p)) {
      out[i] = w[i] > 0.0 ? 1.0 : 0.0;  // 0^{1/inf} = 0
    } else {
      out[i] = std::pow(w[i], 1.0 / p);
    }
  }
  return out;
}

// Solves t + a t^3 = v for the unique real root by safeguarded Newton.
double cubic_inverse(double v, double a) {
  if (a == 0.0) return v;
  double lo = -std::abs(v);
  double hi = std::abs(v);
  double t = v / (1.0 + a * v * v);
  for (int it = 0; it < 200; ++it) {
    const double f = t + a * t * t * t - v;
    if (f == 0.0) return t;
    if (f > 0.0) hi = t; else lo = t;
    double next = t - f / (1.0 + 3.0 * a * t * t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-16 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  return t;
}

}  // namespace

Matrix discretize_symbol(const SymbolSpec& spec, const Grid& grid_x, const Grid& grid_y) {
  if (grid_x.empty() || grid_y.empty()) fail(ErrorKind::ShapeInvalid, "grids must be nonempty");
  const auto rows = static_cast<Eigen::Index>(grid_x.size());
  const auto cols = static_cast<Eigen::Index>(grid_y.size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = static_cast<double>(
          evaluate_symbol(spec, grid_x[static_cast<std::size_t>(i)], grid_y[static_cast<std::size_t>(j)]));
    }
  }
  return m;
}

Grid index_grid(int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "grid size must be positive");
  Grid g;
  g.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) g.push_back(Point::Constant(1, static_cast<double>(i)));
  return g;
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

Grid halton_grid(const Box& box, int n, int prime_offset) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "grid size must be positive");
  const std::size_t dim = box.size();
  if (prime_offset < 0 || static_cast<std::size_t>(prime_offset) + dim > kPrimes.size()) {
    fail(ErrorKind::InvalidArgument, "Halton grid dimension too large");
  }
  Grid g;
  g.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    Point p(static_cast<Eigen::Index>(dim));
    for (std::size_t d = 0; d < dim; ++d) {
      const double u = radical_inverse(static_cast<std::uint64_t>(i), kPrimes[static_cast<std::size_t>(prime_offset) + d]);
      p[static_cast<Eigen::Index>(d)] = box[d].lo + u * box[d].width();
    }
    g.push_back(std::move(p));
  }
  return g;
}

const char* to_string(GridKind k) noexcept {
  return k == GridKind::Index ? "index" : "halton";
}

std::pair<Grid, Grid> experiment_grids(const SymbolSpec& spec, GridKind kind, int n) {
  if (kind == GridKind::Index) {
    if (spec.m_dim() != 1 || spec.n_dim() != 1) {
      fail(ErrorKind::InvalidArgument, "index grids need a symbol on the line");
    }
    return {index_grid(n), index_grid(n)};
  }
  return {halton_grid(spec.box_x(), n, 0), halton_grid(spec.box_y(), n, spec.m_dim())};
}

std::vector<NormGrowthRecord> norm_growth_experiment(const SymbolSpec& spec, double p,
                                                     const std::vector<int>& sizes,
                                                     const SamplerConfig& sampler,
                                                     std::uint64_t seed) {
  if (sizes.empty()) fail(ErrorKind::InvalidArgument, "sizes must be nonempty");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1 || (i > 0 && sizes[i] <= sizes[i - 1])) {
      fail(ErrorKind::InvalidArgument, "sizes must be positive and strictly increasing");
    }
  }
  std::vector<NormGrowthRecord> records;
  Matrix previous;
  for (int n : sizes) {
    const auto start = std::chrono::steady_clock::now();
    const auto [gx, gy] = experiment_grids(spec, sampler.grid, n);
    const Matrix m = discretize_symbol(spec, gx, gy);
    NormEstimatorOptions options;
    options.budget = sampler.budget;
    options.ascent_steps = sampler.ascent_steps;
    options.seed = seed;
    options.jobs = sampler.jobs;
    std::vector<Matrix> warm;
    if (previous.size() > 0) {
      Matrix padded = Matrix::Zero(m.rows(), m.cols());
      padded.topLeftCorner(previous.rows(), previous.cols()) = previous;
      warm.push_back(std::move(padded));
    }
    NormEstimate est = estimate_multiplier_norm(m, p, options, warm);
    previous = std::move(est.maximizer);
    const auto stop = std::chrono::steady_clock::now();
    NormGrowthRecord r;
    r.symbol_id = spec.id();
    r.p = p;
    r.n = n;
    r.lower_bound = est.value;
    r.trials = est.trials;
    r.seed = seed;
    r.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    records.push_back(std::move(r));
  }
  return records;
}

GrowthSummary summarize_growth(const std::vector<NormGrowthRecord>& records, double threshold) {
  GrowthSummary s;
  s.threshold = threshold;
  if (records.size() < 2) return s;
  double mx = 0.0;
  double my = 0.0;
  for (const auto& r : records) {
    mx += std::log2(static_cast<double>(r.n));
    my += r.lower_bound;
  }
  mx /= static_cast<double>(records.size());
  my /= static_cast<double>(records.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& r : records) {
    const double dx = std::log2(static_cast<double>(r.n)) - mx;
    sxy += dx * (r.lower_bound - my);
    sxx += dx * dx;
  }
  s.slope_per_doubling = sxx > 0.0 ? sxy / sxx : 0.0;
  s.growing = s.slope_per_doubling > threshold;
  return s;
}

Reparam identity_reparam(int dim) {
  if (dim < 1) fail(ErrorKind::InvalidArgument, "dimension must be positive");
  return {"identity", dim, [](const Point& x) { return x; },
          [dim](const Point&) { return RealMatrix(RealMatrix::Identity(dim, dim)); },
          [](const Point& x) { return x; }};
}

Reparam affine_reparam(const Vector& scale, const Vector& shift) {
  if (scale.size() < 1 || scale.size() != shift.size()) {
    fail(ErrorKind::DimensionMismatch, "scale and shift must have the same positive length");
  }
  if (!((scale.array() > 0.0).all()) || !shift.allFinite() || !scale.allFinite()) {
    fail(ErrorKind::InvalidArgument, "affine reparametrization needs finite positive scales");
  }
  return {"affine", static_cast<int>(scale.size()),
          [scale, shift](const Point& x) { return Point(scale.cwiseProduct(x) + shift); },
          [scale](const Point&) { return RealMatrix(scale.asDiagonal()); },
          [scale, shift](const Point& x) { return Point((x - shift).cwiseQuotient(scale)); }};
}

Reparam cubic_reparam(int dim, double a) {
  if (dim < 1) fail(ErrorKind::InvalidArgument, "dimension must be positive");
  if (!(a >= 0.0) || !std::isfinite(a)) fail(ErrorKind::InvalidArgument, "cubic coefficient must be >= 0");
  return {"cubic", dim,
          [a](const Point& x) { return Point(x + a * x.array().cube().matrix()); },
          [a](const Point& x) {
            return RealMatrix((1.0 + 3.0 * a * x.array().square()).matrix().asDiagonal());
          },
          [a](const Point& v) {
            Point x(v.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) x[i] = cubic_inverse(v[i], a);
            return x;
          }};
}

Reparam compose(const Reparam& r1, const Reparam& r2) {
  if (r1.dim != r2.dim) fail(ErrorKind::DimensionMismatch, "composed maps differ in dimension");
  return {r2.name + "*" + r1.name, r1.dim,
          [f1 = r1.forward, f2 = r2.forward](const Point& x) { return f2(f1(x)); },
          [f1 = r1.forward, j1 = r1.jacobian, j2 = r2.jacobian](const Point& x) {
            return RealMatrix(j2(f1(x)) * j1(x));
          },
          [i1 = r1.inverse, i2 = r2.inverse](const Point& v) { return i1(i2(v)); }};
}

Reparam random_reparam(int dim, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x52455041ULL);  // "REPA"
  std::uniform_real_distribution<double> log_scale(std::log(0.5), std::log(2.0));
  std::uniform_real_distribution<double> shift(-0.2, 0.2);
  std::uniform_real_distribution<double> cubic(0.0, 1.0);
  Vector sc(dim);
  Vector sh(dim);
  for (int i = 0; i < dim; ++i) {
    sc[i] = std::exp(log_scale(rng));
    sh[i] = shift(rng);
  }
  const double a = cubic(rng);
  Reparam r = compose(cubic_reparam(dim, a), affine_reparam(sc, sh));
  r.name = "random(" + std::to_string(seed) + ")";
  return r;
}

SymbolSpec pullback_symbol(const SymbolSpec& spec, const Reparam& rx, const Reparam& ry) {
  if (rx.dim != spec.m_dim() || ry.dim != spec.n_dim()) {
    fail(ErrorKind::DimensionMismatch, "reparametrization dimensions do not match the symbol");
  }
  const SymbolSpec::Parts& base = spec.parts();
  SymbolSpec::Parts p;
  p.id = "pullback(" + base.id + "," + rx.name + "," + ry.name + ")";
  p.m_dim = base.m_dim;
  p.n_dim = base.n_dim;
  p.field = [f = base.field, fx = rx.forward, fy = ry.forward](const Point& x, const Point& y) {
    return f(fx(x), fy(y));
  };
  if (base.gradient) {
    p.gradient = [g = base.gradient, rx, ry](const Point& x, const Point& y) {
      const Gradient inner = g(rx.forward(x), ry.forward(y));
      return Gradient{rx.jacobian(x).transpose() * inner.dx, ry.jacobian(y).transpose() * inner.dy};
    };
  }
  if (base.mixed_hessian) {
    // The maps act on separate factors, so no second derivatives of them enter.
    p.mixed_hessian = [h = base.mixed_hessian, rx, ry](const Point& x, const Point& y) {
      return RealMatrix(rx.jacobian(x).transpose() * h(rx.forward(x), ry.forward(y)) * ry.jacobian(y));
    };
  }
  const auto preimage = [](const Box& box, const Reparam& r) {
    Point lo(static_cast<Eigen::Index>(box.size()));
    Point hi(static_cast<Eigen::Index>(box.size()));
    for (std::size_t i = 0; i < box.size(); ++i) {
      lo[static_cast<Eigen::Index>(i)] = box[i].lo;
      hi[static_cast<Eigen::Index>(i)] = box[i].hi;
    }
    const Point a = r.inverse(lo);
    const Point b = r.inverse(hi);
    Box out(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
      out[i] = {a[static_cast<Eigen::Index>(i)], b[static_cast<Eigen::Index>(i)]};
    }
    return out;
  };
  p.box_x = preimage(base.box_x, rx);
  p.box_y = preimage(base.box_y, ry);
  p.anchor_x = rx.inverse(base.anchor_x);
  p.anchor_y = ry.inverse(base.anchor_y);
  return SymbolSpec(std::move(p));
}

Matrix circulant(const Eigen::VectorXcd& c) {
  const Eigen::Index n = c.size();
  if (n < 1) fail(ErrorKind::ShapeInvalid, "circulant needs a nonempty vector");
  Matrix x(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) x(i, j) = c[((i - j) % n + n) % n];
  }
  return x;
}

bool is_circulant(const Matrix& x, double tol) {
  if (x.rows() != x.cols() || x.rows() == 0) return false;
  const Eigen::Index n = x.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(x(i, j) - x((i - j + n) % n, 0)) > tol) return false;
    }
  }
  return true;
}

Matrix herz_schur_cyclic(const Eigen::VectorXcd& m) { return circulant(m); }

Matrix fourier_multiplier_cyclic(const Matrix& x, const Eigen::VectorXcd& m) {
  if (x.rows() != m.size() || x.cols() != m.size()) {
    fail(ErrorKind::ShapeMismatch, "multiplier length does not match the group order");
  }
  if (!is_circulant(x)) fail(ErrorKind::ShapeInvalid, "Fourier multipliers act on circulant matrices");
  Eigen::VectorXcd f = x.col(0);
  return circulant(f.cwiseProduct(m));
}

Matrix compression_jp(const Matrix& x, const Vector& phi, const Vector& psi, double p) {
  conjugate_exponent(p);  // validates p
  require_finite(x);
  require_square_weights(x, phi, psi);
  const Vector a = weight_power(phi, p);
  const Vector b = weight_power(psi, p);
  return a.cast<Complex>().asDiagonal() * x * b.cast<Complex>().asDiagonal();
}

}  // namespace schurlab
