#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "schurlab/matcore.hpp"

namespace schurlab {

enum class GroupId { Real, AffinePlus, SL2R, SO3, Heisenberg3, Cyclic };

const char* to_string(GroupId g) noexcept;
std::optional<GroupId> parse_group(const std::string& name);

/// Group element stored as a matrix in the defining representation
/// (Real as [[1, t], [0, 1]], AffinePlus as [[a, b], [0, 1]], Heisenberg3 as
/// an upper unitriangular 3x3 matrix). Cyclic elements are residues.
class GroupElement {
 public:
  static GroupElement real(double t);
  static GroupElement affine(double a, double b);
  static GroupElement sl2r(double a, double b, double c, double d);
  static GroupElement so3(const RealMatrix& r);
  static GroupElement heisenberg(double x, double y, double z);
  static GroupElement cyclic(long long k, int order);
  static GroupElement identity(GroupId group, int order = 0);
  /// Validates the group constraints within 1e-10.
  static GroupElement from_matrix(GroupId group, const RealMatrix& m);

  GroupId group() const noexcept { return group_; }
  const RealMatrix& matrix() const noexcept { return matrix_; }
  long long residue() const noexcept { return residue_; }
  int order() const noexcept { return order_; }

  /// Group-specific coordinates: t; (a, b); (a, b, c, d); the 9 matrix
  /// entries; (x, y, z); k.
  std::vector<double> coordinates() const;

 private:
  GroupElement(GroupId group, RealMatrix m, long long residue = 0, int order = 0)
      : group_(group), matrix_(std::move(m)), residue_(residue), order_(order) {}

  GroupId group_ = GroupId::Real;
  RealMatrix matrix_;
  long long residue_ = 0;
  int order_ = 0;
};

GroupElement group_op(const GroupElement& g, const GroupElement& h);
GroupElement group_inv(const GroupElement& g);

/// Real: t -> t + g; AffinePlus: t -> a t + b; SL2R: t -> (a t + b) / (c t + d).
/// Throws ChartOverflow near a pole of the fractional-linear map.
double act_on_line(const GroupElement& g, double t);

using GroupSymbol = std::function<double(const GroupElement&)>;

/// M(i, j) = m(g_i g_j^{-1}).
Matrix herz_schur_matrix(const GroupSymbol& m, const std::vector<GroupElement>& grid);

/// 1/2 (1 + sgn(ac + bd)) on SL2R.
double sl2r_m0(const GroupElement& g);
/// 1/2 (1 + sgn(c)) on SL2R.
double sl2r_sgn_c(const GroupElement& g);
/// chi_{g . 0 > 0} for a group acting on the line.
double half_line_symbol(const GroupElement& g);

struct CotlarResult {
  int failures = 0;
  int checked = 0;
  int rejected = 0;  // samples in the 1e-9 bands or hitting a chart pole
};

/// Pointwise Cotlar identity for m = chi_{g . 0 > 0}:
///   m(g^-1) m(g^-1 h) = m(h) m(g^-1) + m(h^-1) m(g^-1 h),
/// each term evaluated through the group law and the action.
CotlarResult cotlar_pointwise_check(GroupId group, int samples, std::uint64_t seed, int jobs = 1);

/// Real Lie algebra given by matrix generators; structure constants
/// c[i][j][k] with [X_i, X_j] = sum_k c[i][j][k] X_k.
struct LieAlgebraBasis {
  std::string name;
  std::vector<RealMatrix> generators;
  std::vector<double> structure;  // dim^3, index (i * dim + j) * dim + k

  int dim() const noexcept { return static_cast<int>(generators.size()); }
  double c(int i, int j, int k) const;
  /// Coordinates of [u, v] for coordinate vectors u, v.
  Vector bracket(const Vector& u, const Vector& v) const;
  /// sum_i u_i X_i.
  RealMatrix element(const Vector& u) const;
  /// Coordinates of a matrix in the span of the generators (least squares).
  Vector coordinates(const RealMatrix& m) const;
};

/// Builds the structure constants from matrix generators.
LieAlgebraBasis make_lie_algebra(std::string name, std::vector<RealMatrix> generators);

/// "real", "aff", "sl2", "so3", "heisenberg3", "abelian" (with dim).
LieAlgebraBasis lie_algebra(const std::string& name, int dim = 0);
LieAlgebraBasis lie_algebra_of(GroupId group);

/// Largest |c| coefficient of the Jacobi identity and of c[i][j] + c[j][i].
double jacobi_violation(const LieAlgebraBasis& basis);

struct SubalgebraResult {
  bool ok = true;
  double max_residual = 0.0;  // norm of the bracket component off the subspace
  std::optional<std::pair<int, int>> witness;
};

/// Whether span(subspace) is closed under the bracket. Throws DegenerateBasis
/// if the vectors are linearly dependent.
SubalgebraResult subalgebra_check(const LieAlgebraBasis& basis, const std::vector<Vector>& subspace,
                                  double tol = 1e-9);

/// exp of a Lie algebra element as a group element of `group`.
GroupElement group_exp(GroupId group, const LieAlgebraBasis& basis, const Vector& coords);

struct BoundaryVerdictOptions {
  int samples = 32;
  double radius = 0.1;
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

struct BoundaryVerdict {
  bool pass = false;
  Vector normal;                  // left-translated differential of F at g0
  std::vector<Vector> subalgebra;  // orthonormal basis of its kernel
  SubalgebraResult closure;
  double max_ad_residual = 0.0;
  int ad_samples = 0;
  std::vector<Vector> witnesses;  // boundary points (algebra coordinates) breaking Ad-invariance
};

/// Translates T_{g0} dOmega to the identity, takes h = its kernel and checks
/// that h is a subalgebra with Ad_x h = h at boundary points x = exp(X) near
/// the identity. Throws DegenerateGradient on a vanishing differential.
BoundaryVerdict boundary_subalgebra_verdict(GroupId group, const GroupSymbol& field,
                                            const GroupElement& g0,
                                            const BoundaryVerdictOptions& options = {});

struct TransferenceResult {
  double fourier_lb = 0.0;
  double schur_lb = 0.0;
  Matrix fourier_maximizer;
};

/// Lower bounds for T_m on circulants of Z_N and for the Schur multiplier
/// M(i, j) = m(i - j mod N). The Schur search is also started from the best
/// circulant, so fourier_lb <= schur_lb.
TransferenceResult fourier_multiplier_norm_finite_cyclic(const Eigen::VectorXcd& m, double p,
                                                         int budget, std::uint64_t seed,
                                                         int jobs = 1);

}  // namespace schurlab
