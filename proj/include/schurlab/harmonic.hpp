#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "schurlab/geometry.hpp"
#include "schurlab/matcore.hpp"

namespace schurlab {

/// Complex samples on the periodic unit cube [0, 1)^n, row-major with the
/// last axis fastest.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(std::vector<int> shape, std::vector<Complex> values);

  static GridFunction zeros(std::vector<int> shape);
  /// values at the grid points (i_1 / N_1, ..., i_n / N_n).
  static GridFunction sample(std::vector<int> shape,
                             const std::function<Complex(const Point&)>& f);

  int dim() const noexcept { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<Complex>& values() const noexcept { return values_; }
  std::vector<Complex>& values() noexcept { return values_; }

  /// Multi-index of flat position `flat`.
  std::vector<int> index(std::size_t flat) const;
  Point point(std::size_t flat) const;

 private:
  std::vector<int> shape_;
  std::vector<Complex> values_;
};

/// Signed frequency of DFT slot i on an axis of length n (Nyquist maps to
/// -n/2).
int frequency(int i, int n) noexcept;

/// Normalized forward DFT: fhat(xi) = N^{-1} sum_x f(x) e^{-2 pi i <xi, x>}.
GridFunction dft(const GridFunction& f);
GridFunction inverse_dft(const GridFunction& fhat);

/// Applies the Fourier multiplier `symbol(xi)` on the integer frequency lattice.
GridFunction fourier_multiplier(const GridFunction& f,
                                const std::function<double(const std::vector<int>&)>& symbol);

/// H_u: keeps the modes with <xi, u> > 0. Modes on <xi, u> = 0 are removed.
/// Throws ZeroDirection if |u| < 1e-12.
GridFunction directional_hilbert(const GridFunction& f, const Vector& u);

/// P_0: keeps the modes with <xi, u> = 0.
GridFunction hyperplane_projection(const GridFunction& f, const Vector& u);

/// || (sum_j |f_j|^2)^{1/2} ||_{L_p} by Riemann sums over the unit cube.
double square_function_norm(const std::vector<GridFunction>& fs, double p);

struct SquareFunctionResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
};

SquareFunctionResult square_function_test(const std::vector<GridFunction>& fs,
                                          const std::vector<Vector>& us, double p, double c);

/// Norm of the Riesz projection on L_p of the circle, 1 / sin(pi / p).
double riesz_projection_constant(double p);

/// Random complex coefficients on the modes with |xi_i| <= degree.
GridFunction random_trig_polynomial(const std::vector<int>& shape, int degree, Rng& rng);

struct ScalingLimitResult {
  std::vector<double> epsilons;
  std::vector<double> fractions;  // agreement per epsilon
  double fraction = 0.0;          // at the smallest epsilon
  int counted = 0;
  int excluded = 0;               // samples inside the |<n2, eta - xi>| < 1e-6 band
};

/// Compares chi_Sigma(x + eps T xi, y + eps eta) with [<n2, eta - xi> > 0] on
/// Gaussian samples (xi, eta). Requires a transverse z and T^t n1 = -n2.
ScalingLimitResult scaling_limit_check(const SymbolSpec& spec, const BoundaryPoint& z,
                                       const RealMatrix& t, const std::vector<double>& epsilons,
                                       int samples, std::uint64_t seed);

/// Invertible T with T^t n1 = -n2: a rotation taking n1 / |n1| to -n2 / |n2|
/// composed with a rank-one stretch along n1.
RealMatrix solve_T(const Vector& n1, const Vector& n2);

}  // namespace schurlab
