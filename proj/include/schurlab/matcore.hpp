#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "schurlab/random.hpp"

namespace schurlab {

using Complex = std::complex<double>;
/// Dense complex matrix: discretized symbols, test operators and Schur products.
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Nonincreasing singular values, one per min(rows, cols).
using SingularSpectrum = Eigen::VectorXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what = "matrix");

/// Exponent conjugate to p (1 <-> infinity).
double conjugate_exponent(double p);

SingularSpectrum singular_spectrum(const Matrix& a);

struct Svd {
  Matrix u;
  SingularSpectrum sigma;
  Matrix v;
};

/// Thin SVD with a = u * diag(sigma) * v^*.
Svd thin_svd(const Matrix& a);

/// (sum sigma_i^p)^(1/p); the largest singular value when p is infinite.
double schatten_norm(const Matrix& a, double p);
double schatten_norm(const SingularSpectrum& sigma, double p);

/// Entrywise product (S_M(A))_{jk} = M_{jk} A_{jk}.
Matrix schur_product(const Matrix& symbol, const Matrix& a);

/// Unit-norm element of S_q (q conjugate to p) norming `a`:
/// <a, z> = Tr(a z^*) = ||a||_p. Zero input gives a zero output.
Matrix norming_dual(const Matrix& a, double p);

Matrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng);

struct NormEstimatorOptions {
  int budget = 8;         // random starts (alternating Gaussian / rank-one)
  int ascent_steps = 50;  // duality ascent iterations per start
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct NormEstimate {
  double value = 0.0;
  Matrix maximizer;  // test matrix attaining `value` as ||M o A||_p / ||A||_p
  int trials = 0;
};

/// Ratio ||M o A||_p / ||A||_p (0 for A = 0).
double multiplier_ratio(const Matrix& symbol, const Matrix& a, double p);

/// Improves `start` by the duality ascent A -> dual_q(conj(M) o dual_p(M o A)),
/// which never decreases the ratio. Returns the best matrix found, normalized
/// to unit S_p norm, together with its ratio.
NormEstimate ascend_multiplier_ratio(const Matrix& symbol, const Matrix& start, double p,
                                     int max_steps);

/// Randomized lower bound for the norm of S_M on S_p. Always includes the
/// matrix unit at the entry of largest modulus, every warm start, and
/// `budget` seeded random starts; trial k is seeded independently of the
/// budget so larger budgets never give smaller bounds.
NormEstimate estimate_multiplier_norm(const Matrix& symbol, double p,
                                      const NormEstimatorOptions& options,
                                      const std::vector<Matrix>& warm_starts = {});

double multiplier_norm_lower_bound(const Matrix& symbol, double p, int budget,
                                   std::uint64_t seed);

}  // namespace schurlab
