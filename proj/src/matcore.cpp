#include "schurlab/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/parallel.hpp"

namespace schurlab {

namespace {

constexpr std::uint64_t kTrialStream = 0x5452'4941'4CULL;  // "TRIAL"

void require_exponent(double p) {
  if (std::isnan(p) || p < 1.0) {
    fail(ErrorKind::InvalidExponent, "Schatten exponent must satisfy p >= 1, got " + std::to_string(p));
  }
}

void require_nonempty(const Matrix& a, const char* what) {
  if (a.rows() == 0 || a.cols() == 0) {
    fail(ErrorKind::ShapeInvalid, std::string(what) + " must have positive dimensions");
  }
}

// Spectrum sorted nonincreasing with a stable sort; negative round-off clipped.
SingularSpectrum sorted_spectrum(SingularSpectrum s) {
  std::vector<double> v(s.data(), s.data() + s.size());
  std::stable_sort(v.begin(), v.end(), std::greater<>());
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = std::max(0.0, v[static_cast<std::size_t>(i)]);
  return s;
}

Matrix matrix_unit(Eigen::Index rows, Eigen::Index cols, Eigen::Index i, Eigen::Index j) {
  Matrix e = Matrix::Zero(rows, cols);
  e(i, j) = 1.0;
  return e;
}

bool better(const NormEstimate& a, const NormEstimate& b) { return a.value > b.value; }

}  // namespace

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) fail(ErrorKind::NonFinite, std::string(what) + " has NaN or infinite entries");
}

double conjugate_exponent(double p) {
  require_exponent(p);
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return kInfinity;
  return p / (p - 1.0);
}

SingularSpectrum singular_spectrum(const Matrix& a) {
  require_finite(a);
  if (a.size() == 0) return SingularSpectrum();
  Eigen::BDCSVD<Matrix> svd(a);
  if (!svd.singularValues().allFinite()) return sorted_spectrum(Eigen::JacobiSVD<Matrix>(a).singularValues());
  return sorted_spectrum(svd.singularValues());
}

Svd thin_svd(const Matrix& a) {
  require_finite(a);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // Eigen already orders the values nonincreasingly.
  Svd out{svd.matrixU(), svd.singularValues().cwiseMax(0.0), svd.matrixV()};
  if (out.u.allFinite() && out.v.allFinite() && out.sigma.allFinite()) return out;
  // Divide and conquer occasionally breaks down on highly structured input
  // (circulants with repeated singular values); one-sided Jacobi does not.
  Eigen::JacobiSVD<Matrix> jacobi(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {jacobi.matrixU(), jacobi.singularValues().cwiseMax(0.0), jacobi.matrixV()};
}

double schatten_norm(const SingularSpectrum& sigma, double p) {
  require_exponent(p);
  if (sigma.size() == 0) return 0.0;
  const double top = sigma.maxCoeff();
  if (top == 0.0) return 0.0;
  if (std::isinf(p)) return top;
  // Scale by the largest value so sigma^p cannot overflow or underflow.
  double sum = 0.0;
  for (double s : sigma) sum += std::pow(s / top, p);
  return top * std::pow(sum, 1.0 / p);
}

double schatten_norm(const Matrix& a, double p) {
  require_exponent(p);
  require_finite(a);
  if (p == 2.0) return a.stableNorm();
  return schatten_norm(singular_spectrum(a), p);
}

Matrix schur_product(const Matrix& symbol, const Matrix& a) {
  if (symbol.rows() != a.rows() || symbol.cols() != a.cols()) {
    fail(ErrorKind::ShapeMismatch, "Schur product of " + std::to_string(symbol.rows()) + "x" +
                                       std::to_string(symbol.cols()) + " symbol with " +
                                       std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                       " matrix");
  }
  return symbol.cwiseProduct(a);
}

namespace {

struct Dual {
  Matrix element;
  SingularSpectrum sigma;  // singular values of `element`
};

// Norming element built from an SVD of the input: U diag(w) V^* with w chosen
// so that <a, z> = ||a||_p and ||z||_q = 1.
Dual dual_from_svd(const Svd& f, double p, Eigen::Index rows, Eigen::Index cols) {
  const Eigen::Index k = f.sigma.size();
  if (k == 0 || f.sigma[0] == 0.0) return {Matrix::Zero(rows, cols), SingularSpectrum::Zero(k)};
  SingularSpectrum weights = SingularSpectrum::Zero(k);
  if (std::isinf(p)) {
    weights[0] = 1.0;
    return {f.u.col(0) * f.v.col(0).adjoint(), weights};
  }
  if (p == 1.0) {
    // Polar part restricted to the numerically nonzero singular values.
    const double cutoff = f.sigma[0] * 1e-14 * static_cast<double>(std::max(rows, cols));
    for (Eigen::Index i = 0; i < k; ++i) weights[i] = f.sigma[i] > cutoff ? 1.0 : 0.0;
  } else {
    const double norm = schatten_norm(f.sigma, p);
    for (Eigen::Index i = 0; i < k; ++i) weights[i] = std::pow(f.sigma[i] / norm, p - 1.0);
  }
  return {f.u * weights.asDiagonal() * f.v.adjoint(), weights};
}

Dual norming_dual_with_spectrum(const Matrix& a, double p) {
  if (p == 2.0) {
    const double n = a.stableNorm();
    if (n == 0.0) return {Matrix::Zero(a.rows(), a.cols()), SingularSpectrum()};
    return {a / n, SingularSpectrum()};
  }
  return dual_from_svd(thin_svd(a), p, a.rows(), a.cols());
}

// ||a||_p, reusing a spectrum when one is at hand.
double norm_with_hint(const Matrix& a, const SingularSpectrum& sigma, double p) {
  if (p == 2.0 || sigma.size() == 0) return schatten_norm(a, p);
  return schatten_norm(sigma, p);
}

}  // namespace

Matrix norming_dual(const Matrix& a, double p) {
  require_exponent(p);
  require_finite(a);
  return norming_dual_with_spectrum(a, p).element;
}

Matrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

double multiplier_ratio(const Matrix& symbol, const Matrix& a, double p) {
  const double denom = schatten_norm(a, p);
  if (denom == 0.0) return 0.0;
  return schatten_norm(schur_product(symbol, a), p) / denom;
}

NormEstimate ascend_multiplier_ratio(const Matrix& symbol, const Matrix& start, double p,
                                     int max_steps) {
  const double q = conjugate_exponent(p);
  if (symbol.rows() != start.rows() || symbol.cols() != start.cols()) {
    fail(ErrorKind::ShapeMismatch, "start matrix shape differs from symbol shape");
  }
  NormEstimate best;
  const double start_norm = schatten_norm(start, p);
  if (start_norm == 0.0) {
    best.maximizer = Matrix::Zero(symbol.rows(), symbol.cols());
    return best;
  }
  best.maximizer = start / start_norm;
  Matrix image = schur_product(symbol, best.maximizer);
  Svd image_svd;
  if (p != 2.0) image_svd = thin_svd(image);
  best.value = norm_with_hint(image, image_svd.sigma, p);

  const Matrix adjoint_symbol = symbol.conjugate();
  for (int step = 0; step < max_steps && best.value > 0.0; ++step) {
    const Matrix witness = p == 2.0 ? Matrix(image / image.stableNorm())
                                    : dual_from_svd(image_svd, p, image.rows(), image.cols()).element;
    Dual next = norming_dual_with_spectrum(schur_product(adjoint_symbol, witness), q);
    const double next_norm = norm_with_hint(next.element, next.sigma, p);
    if (next_norm == 0.0) break;
    Matrix next_image = schur_product(symbol, next.element);
    Svd next_svd;
    if (p != 2.0) next_svd = thin_svd(next_image);
    const double value = norm_with_hint(next_image, next_svd.sigma, p) / next_norm;
    const bool improved = value > best.value * (1.0 + 1e-13);
    if (value > best.value) {
      best.value = value;
      best.maximizer = next.element / next_norm;
      image = next_image / next_norm;
      image_svd = std::move(next_svd);
      image_svd.sigma /= next_norm;
    }
    if (!improved) break;
  }
  return best;
}

NormEstimate estimate_multiplier_norm(const Matrix& symbol, double p,
                                      const NormEstimatorOptions& options,
                                      const std::vector<Matrix>& warm_starts) {
  require_exponent(p);
  require_nonempty(symbol, "symbol");
  require_finite(symbol, "symbol");
  if (options.budget < 1) fail(ErrorKind::InvalidArgument, "budget must be at least 1");
  if (options.ascent_steps < 0) fail(ErrorKind::InvalidArgument, "ascent_steps must be nonnegative");
  const Eigen::Index rows = symbol.rows();
  const Eigen::Index cols = symbol.cols();

  // The matrix unit at the largest |M_jk| gives ratio |M_jk| for every p.
  Eigen::Index bi = 0;
  Eigen::Index bj = 0;
  symbol.cwiseAbs().maxCoeff(&bi, &bj);
  NormEstimate best;
  best.maximizer = matrix_unit(rows, cols, bi, bj);
  best.value = std::abs(symbol(bi, bj));

  for (const Matrix& warm : warm_starts) {
    if (warm.rows() != rows || warm.cols() != cols) {
      fail(ErrorKind::ShapeMismatch, "warm start shape differs from symbol shape");
    }
    NormEstimate candidate = ascend_multiplier_ratio(symbol, warm, p, options.ascent_steps);
    if (better(candidate, best)) best = std::move(candidate);
  }

  std::vector<NormEstimate> trials(static_cast<std::size_t>(options.budget));
  parallel_for(trials.size(), options.jobs, [&](std::size_t t) {
    Rng rng = make_rng(options.seed, kTrialStream, t);
    Matrix start;
    if (t % 2 == 0) {
      start = complex_gaussian(rows, cols, rng);
    } else {
      start = complex_gaussian(rows, 1, rng) * complex_gaussian(cols, 1, rng).adjoint();
    }
    trials[t] = ascend_multiplier_ratio(symbol, start, p, options.ascent_steps);
  });
  for (NormEstimate& candidate : trials) {
    if (better(candidate, best)) best = std::move(candidate);
  }
  best.trials = options.budget;
  return best;
}

double multiplier_norm_lower_bound(const Matrix& symbol, double p, int budget,
                                   std::uint64_t seed) {
  NormEstimatorOptions options;
  options.budget = budget;
  options.seed = seed;
  return estimate_multiplier_norm(symbol, p, options).value;
}

}  // namespace schurlab
