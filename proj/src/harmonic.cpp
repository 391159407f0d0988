#include "schurlab/harmonic.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "schurlab/errors.hpp"

namespace schurlab {

namespace {

// The FFTW planner is not reentrant; plan creation and destruction are
// serialized, execution is not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t total(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int s : shape) {
    if (s < 1) fail(ErrorKind::ShapeInvalid, "grid axes must have positive length");
    n *= static_cast<std::size_t>(s);
  }
  return n;
}

std::vector<Complex> transform(const GridFunction& f, int sign) {
  std::vector<Complex> in = f.values();
  std::vector<Complex> out(in.size());
  if (in.empty()) return out;
  auto* pin = reinterpret_cast<fftw_complex*>(in.data());
  auto* pout = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(f.dim(), f.shape().data(), pin, pout, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

double dot_frequency(const std::vector<int>& xi, const Vector& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < xi.size(); ++i) s += xi[i] * u[static_cast<Eigen::Index>(i)];
  return s;
}

double frequency_norm(const std::vector<int>& xi) {
  double s = 0.0;
  for (int k : xi) s += static_cast<double>(k) * k;
  return std::sqrt(s);
}

Vector checked_direction(const GridFunction& f, const Vector& u) {
  if (u.size() != f.dim()) {
    fail(ErrorKind::DimensionMismatch, "direction dimension differs from the grid dimension");
  }
  const double n = u.norm();
  if (!(n >= 1e-12)) fail(ErrorKind::ZeroDirection, "direction vector is (numerically) zero");
  return u / n;
}

// Sign of <xi, u> with an exact-zero band scaled to the operands, so that
// xi and -xi land on opposite sides or both on the hyperplane.
int side(const std::vector<int>& xi, const Vector& u) {
  const double d = dot_frequency(xi, u);
  if (std::abs(d) <= 1e-12 * frequency_norm(xi)) return 0;
  return d > 0.0 ? 1 : -1;
}

}  // namespace

GridFunction::GridFunction(std::vector<int> shape, std::vector<Complex> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (shape_.empty()) fail(ErrorKind::ShapeInvalid, "grid function needs at least one axis");
  if (total(shape_) != values_.size()) {
    fail(ErrorKind::ShapeMismatch, "value count does not match the grid shape");
  }
  for (const Complex& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      fail(ErrorKind::NonFinite, "grid function has non-finite samples");
    }
  }
}

GridFunction GridFunction::zeros(std::vector<int> shape) {
  const std::size_t n = total(shape);
  return GridFunction(std::move(shape), std::vector<Complex>(n));
}

GridFunction GridFunction::sample(std::vector<int> shape,
                                  const std::function<Complex(const Point&)>& f) {
  GridFunction g = zeros(std::move(shape));
  for (std::size_t k = 0; k < g.size(); ++k) g.values_[k] = f(g.point(k));
  return GridFunction(g.shape_, std::move(g.values_));
}

std::vector<int> GridFunction::index(std::size_t flat) const {
  std::vector<int> idx(shape_.size());
  for (std::size_t a = shape_.size(); a-- > 0;) {
    const auto s = static_cast<std::size_t>(shape_[a]);
    idx[a] = static_cast<int>(flat % s);
    flat /= s;
  }
  return idx;
}

Point GridFunction::point(std::size_t flat) const {
  const std::vector<int> idx = index(flat);
  Point p(dim());
  for (int a = 0; a < dim(); ++a) {
    p[a] = static_cast<double>(idx[static_cast<std::size_t>(a)]) / shape_[static_cast<std::size_t>(a)];
  }
  return p;
}

int frequency(int i, int n) noexcept { return i < (n + 1) / 2 ? i : i - n; }

GridFunction dft(const GridFunction& f) {
  std::vector<Complex> out = transform(f, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(out.size());
  for (Complex& v : out) v *= scale;
  return GridFunction(f.shape(), std::move(out));
}

GridFunction inverse_dft(const GridFunction& fhat) {
  return GridFunction(fhat.shape(), transform(fhat, FFTW_BACKWARD));
}

GridFunction fourier_multiplier(const GridFunction& f,
                                const std::function<double(const std::vector<int>&)>& symbol) {
  GridFunction fhat = dft(f);
  std::vector<int> xi(f.shape().size());
  for (std::size_t k = 0; k < fhat.size(); ++k) {
    const std::vector<int> idx = fhat.index(k);
    for (std::size_t a = 0; a < idx.size(); ++a) xi[a] = frequency(idx[a], f.shape()[a]);
    fhat.values()[k] *= symbol(xi);
  }
  return inverse_dft(fhat);
}

GridFunction directional_hilbert(const GridFunction& f, const Vector& u) {
  const Vector dir = checked_direction(f, u);
  return fourier_multiplier(f, [&dir](const std::vector<int>& xi) {
    return side(xi, dir) > 0 ? 1.0 : 0.0;
  });
}

GridFunction hyperplane_projection(const GridFunction& f, const Vector& u) {
  const Vector dir = checked_direction(f, u);
  return fourier_multiplier(f, [&dir](const std::vector<int>& xi) {
    return side(xi, dir) == 0 ? 1.0 : 0.0;
  });
}

double square_function_norm(const std::vector<GridFunction>& fs, double p) {
  conjugate_exponent(p);
  if (fs.empty()) return 0.0;
  const std::size_t n = fs.front().size();
  for (const auto& f : fs) {
    if (f.shape() != fs.front().shape()) fail(ErrorKind::ShapeMismatch, "grid functions differ in shape");
  }
  std::vector<double> sq(n, 0.0);
  for (const auto& f : fs) {
    for (std::size_t k = 0; k < n; ++k) sq[k] += std::norm(f.values()[k]);
  }
  double top = 0.0;
  for (double v : sq) top = std::max(top, std::sqrt(v));
  if (top == 0.0 || std::isinf(p)) return top;
  double sum = 0.0;
  for (double v : sq) sum += std::pow(std::sqrt(v) / top, p);
  return top * std::pow(sum / static_cast<double>(n), 1.0 / p);
}

SquareFunctionResult square_function_test(const std::vector<GridFunction>& fs,
                                          const std::vector<Vector>& us, double p, double c) {
  if (fs.size() != us.size()) fail(ErrorKind::ShapeMismatch, "need one direction per function");
  std::vector<GridFunction> images;
  images.reserve(fs.size());
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (fs[j].shape() != fs.front().shape()) fail(ErrorKind::ShapeMismatch, "grid functions differ in shape");
    images.push_back(directional_hilbert(fs[j], us[j]));
  }
  SquareFunctionResult r;
  r.lhs = square_function_norm(images, p);
  r.rhs = square_function_norm(fs, p);
  r.pass = r.lhs <= c * r.rhs * (1.0 + 1e-9);
  return r;
}

double riesz_projection_constant(double p) {
  conjugate_exponent(p);
  if (p == 1.0 || std::isinf(p)) return kInfinity;
  return 1.0 / std::sin(std::numbers::pi / p);
}

GridFunction random_trig_polynomial(const std::vector<int>& shape, int degree, Rng& rng) {
  if (degree < 0) fail(ErrorKind::InvalidArgument, "degree must be nonnegative");
  GridFunction fhat = GridFunction::zeros(shape);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < fhat.size(); ++k) {
    const std::vector<int> idx = fhat.index(k);
    bool inside = true;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      inside = inside && std::abs(frequency(idx[a], shape[a])) <= degree;
    }
    if (!inside) continue;
    const double re = normal(rng);
    const double im = normal(rng);
    fhat.values()[k] = Complex(re, im);
  }
  return inverse_dft(fhat);
}

ScalingLimitResult scaling_limit_check(const SymbolSpec& spec, const BoundaryPoint& z,
                                       const RealMatrix& t, const std::vector<double>& epsilons,
                                       int samples, std::uint64_t seed) {
  if (spec.m_dim() != spec.n_dim()) {
    fail(ErrorKind::DimensionMismatch, "the scaling limit needs equal chart dimensions");
  }
  const int n = spec.n_dim();
  if (t.rows() != n || t.cols() != n) fail(ErrorKind::DimensionMismatch, "T has the wrong size");
  if (!transversality_check(z)) fail(ErrorKind::NonTransverse, "scaling limit needs a transverse point");
  if (epsilons.empty() || samples < 1) fail(ErrorKind::InvalidArgument, "need epsilons and samples");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || (i > 0 && epsilons[i] >= epsilons[i - 1])) {
      fail(ErrorKind::InvalidArgument, "epsilons must be positive and decreasing");
    }
  }
  const Vector n1 = z.n1 / std::sqrt(z.n1.squaredNorm() + z.n2.squaredNorm());
  const Vector n2 = z.n2 / std::sqrt(z.n1.squaredNorm() + z.n2.squaredNorm());
  if ((t.transpose() * n1 + n2).norm() > 1e-9) {
    fail(ErrorKind::InvalidArgument, "T does not satisfy T^t n1 = -n2");
  }
  Rng rng = make_rng(seed, 0x5343414CULL);  // "SCAL"
  std::normal_distribution<double> normal(0.0, 1.0);
  ScalingLimitResult r;
  r.epsilons = epsilons;
  std::vector<int> agree(epsilons.size(), 0);
  for (int s = 0; s < samples; ++s) {
    Vector xi(n);
    Vector eta(n);
    for (int i = 0; i < n; ++i) xi[i] = normal(rng);
    for (int i = 0; i < n; ++i) eta[i] = normal(rng);
    const double lin = n2.dot(eta - xi);
    if (std::abs(lin) < 1e-6) {
      ++r.excluded;
      continue;
    }
    ++r.counted;
    const bool expected = lin > 0.0;
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
      bool inside = false;
      try {
        inside = spec.field(z.x + epsilons[e] * (t * xi), z.y + epsilons[e] * eta) > 0.0;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::OutOfDomain) throw;
        inside = !expected;  // left the chart: counts as a disagreement
      }
      if (inside == expected) ++agree[e];
    }
  }
  for (int a : agree) {
    r.fractions.push_back(r.counted > 0 ? static_cast<double>(a) / r.counted : 1.0);
  }
  r.fraction = r.fractions.back();
  return r;
}

RealMatrix solve_T(const Vector& n1, const Vector& n2) {
  if (n1.size() != n2.size() || n1.size() < 1) {
    fail(ErrorKind::DimensionMismatch, "n1 and n2 must have the same positive dimension");
  }
  if (!n1.allFinite() || !n2.allFinite()) fail(ErrorKind::NonFinite, "normals must be finite");
  const double l1 = n1.norm();
  const double l2 = n2.norm();
  if (!(l1 >= kDegenerateGradient) || !(l2 >= kDegenerateGradient)) {
    fail(ErrorKind::ZeroVector, "solve_T needs nonzero n1 and n2");
  }
  const Eigen::Index n = n1.size();
  if (n == 1) return RealMatrix::Constant(1, 1, -n2[0] / n1[0]);
  const Vector a = n1 / l1;
  const Vector b = -n2 / l2;
  const RealMatrix id = RealMatrix::Identity(n, n);
  const RealMatrix stretch = id + (l2 / l1 - 1.0) * a * a.transpose();
  // Rotation taking a to b; a half turn first when they point apart, so the
  // remaining plane rotation has a well-conditioned formula.
  RealMatrix first = id;
  Vector from = a;
  if (a.dot(b) < 0.0) {
    Vector w = Vector::Zero(n);
    Eigen::Index k = 0;
    a.cwiseAbs().minCoeff(&k);
    w[k] = 1.0;
    w -= w.dot(a) * a;
    w.normalize();
    first = id - 2.0 * a * a.transpose() - 2.0 * w * w.transpose();
    from = -a;
  }
  const RealMatrix k = b * from.transpose() - from * b.transpose();
  const RealMatrix second = id + k + (1.0 / (1.0 + from.dot(b))) * k * k;
  const RealMatrix tt = second * first * stretch;
  return tt.transpose();
}

}  // namespace schurlab
