#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/groups.hpp"
#include "schurlab/random.hpp"

namespace schurlab {

namespace {

RealMatrix unit(int n, int i, int j) {
  RealMatrix m = RealMatrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

RealMatrix flatten(const std::vector<RealMatrix>& gens) {
  const Eigen::Index size = gens.front().size();
  RealMatrix g(size, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t i = 0; i < gens.size(); ++i) {
    g.col(static_cast<Eigen::Index>(i)) = gens[i].reshaped();
  }
  return g;
}

// Orthonormal basis of the complement of a unit vector (columns).
RealMatrix complement(const Vector& a) {
  const Eigen::Index k = a.size();
  if (k <= 1) return RealMatrix(k, 0);
  const RealMatrix column = a;
  Eigen::HouseholderQR<RealMatrix> qr(column);
  const RealMatrix q = qr.householderQ() * RealMatrix::Identity(k, k);
  return q.rightCols(k - 1);
}

}  // namespace

double LieAlgebraBasis::c(int i, int j, int k) const {
  const int d = dim();
  return structure[static_cast<std::size_t>((i * d + j) * d + k)];
}

Vector LieAlgebraBasis::bracket(const Vector& u, const Vector& v) const {
  const int d = dim();
  if (u.size() != d || v.size() != d) fail(ErrorKind::DimensionMismatch, "coordinate vector has the wrong size");
  Vector out = Vector::Zero(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double w = u[i] * v[j];
      if (w == 0.0) continue;
      for (int k = 0; k < d; ++k) out[k] += w * c(i, j, k);
    }
  }
  return out;
}

RealMatrix LieAlgebraBasis::element(const Vector& u) const {
  if (u.size() != dim()) fail(ErrorKind::DimensionMismatch, "coordinate vector has the wrong size");
  RealMatrix m = RealMatrix::Zero(generators.front().rows(), generators.front().cols());
  for (int i = 0; i < dim(); ++i) m += u[i] * generators[static_cast<std::size_t>(i)];
  return m;
}

Vector LieAlgebraBasis::coordinates(const RealMatrix& m) const {
  const RealMatrix g = flatten(generators);
  const Vector flat = m.reshaped();
  return g.colPivHouseholderQr().solve(flat);
}

LieAlgebraBasis make_lie_algebra(std::string name, std::vector<RealMatrix> generators) {
  if (generators.empty()) fail(ErrorKind::DegenerateBasis, "a Lie algebra needs generators");
  for (const auto& g : generators) {
    if (g.rows() != generators.front().rows() || g.cols() != g.rows() ||
        g.cols() != generators.front().cols()) {
      fail(ErrorKind::DimensionMismatch, "generators must be square matrices of one size");
    }
  }
  const RealMatrix flat = flatten(generators);
  Eigen::ColPivHouseholderQR<RealMatrix> qr(flat);
  if (qr.rank() < static_cast<Eigen::Index>(generators.size())) {
    fail(ErrorKind::DegenerateBasis, "generators are linearly dependent");
  }
  LieAlgebraBasis b;
  b.name = std::move(name);
  b.generators = std::move(generators);
  const int d = b.dim();
  b.structure.assign(static_cast<std::size_t>(d * d * d), 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const RealMatrix& x = b.generators[static_cast<std::size_t>(i)];
      const RealMatrix& y = b.generators[static_cast<std::size_t>(j)];
      const RealMatrix br = x * y - y * x;
      const Vector coords = qr.solve(Vector(br.reshaped()));
      if ((flat * coords - Vector(br.reshaped())).norm() > 1e-10 * (1.0 + br.norm())) {
        fail(ErrorKind::InvalidArgument, "generators do not span a Lie algebra");
      }
      for (int k = 0; k < d; ++k) {
        b.structure[static_cast<std::size_t>((i * d + j) * d + k)] = coords[k];
      }
    }
  }
  return b;
}

LieAlgebraBasis lie_algebra(const std::string& name, int dim) {
  if (name == "real") return make_lie_algebra(name, {unit(2, 0, 1)});
  if (name == "aff") return make_lie_algebra(name, {unit(2, 0, 0), unit(2, 0, 1)});
  if (name == "sl2") {
    return make_lie_algebra(name, {unit(2, 0, 0) - unit(2, 1, 1), unit(2, 0, 1), unit(2, 1, 0)});
  }
  if (name == "so3") {
    return make_lie_algebra(name, {unit(3, 2, 1) - unit(3, 1, 2), unit(3, 0, 2) - unit(3, 2, 0),
                                   unit(3, 1, 0) - unit(3, 0, 1)});
  }
  if (name == "heisenberg3") {
    return make_lie_algebra(name, {unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)});
  }
  if (name == "abelian") {
    if (dim < 1) fail(ErrorKind::InvalidArgument, "abelian algebra needs a positive dimension");
    std::vector<RealMatrix> gens;
    for (int i = 0; i < dim; ++i) gens.push_back(unit(dim, i, i));
    return make_lie_algebra("abelian" + std::to_string(dim), std::move(gens));
  }
  fail(ErrorKind::InvalidArgument, "unknown Lie algebra '" + name + "'");
}

LieAlgebraBasis lie_algebra_of(GroupId group) {
  switch (group) {
    case GroupId::Real: return lie_algebra("real");
    case GroupId::AffinePlus: return lie_algebra("aff");
    case GroupId::SL2R: return lie_algebra("sl2");
    case GroupId::SO3: return lie_algebra("so3");
    case GroupId::Heisenberg3: return lie_algebra("heisenberg3");
    case GroupId::Cyclic: break;
  }
  fail(ErrorKind::InvalidArgument, "finite groups have no Lie algebra");
}

double jacobi_violation(const LieAlgebraBasis& basis) {
  const int d = basis.dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) worst = std::max(worst, std::abs(basis.c(i, j, k) + basis.c(j, i, k)));
    }
  }
  const auto e = [d](int i) { return Vector(Vector::Unit(d, i)); };
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        const Vector s = basis.bracket(e(i), basis.bracket(e(j), e(k))) +
                         basis.bracket(e(j), basis.bracket(e(k), e(i))) +
                         basis.bracket(e(k), basis.bracket(e(i), e(j)));
        worst = std::max(worst, s.cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

SubalgebraResult subalgebra_check(const LieAlgebraBasis& basis, const std::vector<Vector>& subspace,
                                  double tol) {
  SubalgebraResult r;
  if (subspace.empty()) return r;
  const int d = basis.dim();
  RealMatrix s(d, static_cast<Eigen::Index>(subspace.size()));
  for (std::size_t i = 0; i < subspace.size(); ++i) {
    if (subspace[i].size() != d) fail(ErrorKind::DimensionMismatch, "subspace vector has the wrong size");
    s.col(static_cast<Eigen::Index>(i)) = subspace[i];
  }
  Eigen::JacobiSVD<RealMatrix> svd(s, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 1e-10 * sv[0])) {
    fail(ErrorKind::DegenerateBasis, "candidate subspace vectors are linearly dependent");
  }
  const RealMatrix q = svd.matrixU();
  for (Eigen::Index a = 0; a < q.cols(); ++a) {
    for (Eigen::Index b = a + 1; b < q.cols(); ++b) {
      const Vector br = basis.bracket(q.col(a), q.col(b));
      const double off = (br - q * (q.transpose() * br)).norm();
      if (off > r.max_residual) {
        r.max_residual = off;
        r.witness = std::make_pair(static_cast<int>(a), static_cast<int>(b));
      }
    }
  }
  r.ok = r.max_residual <= tol;
  if (r.ok) r.witness.reset();
  return r;
}

GroupElement group_exp(GroupId group, const LieAlgebraBasis& basis, const Vector& coords) {
  const RealMatrix x = basis.element(coords);
  const RealMatrix g = x.exp();
  return GroupElement::from_matrix(group, g);
}

BoundaryVerdict boundary_subalgebra_verdict(GroupId group, const GroupSymbol& field,
                                            const GroupElement& g0,
                                            const BoundaryVerdictOptions& options) {
  if (g0.group() != group) fail(ErrorKind::GroupMismatch, "g0 belongs to another group");
  const LieAlgebraBasis basis = lie_algebra_of(group);
  const int d = basis.dim();
  const auto f = [&](const Vector& x) { return field(group_op(g0, group_exp(group, basis, x))); };

  // Five-point stencil for the left-translated differential at the identity.
  constexpr double h = 1e-3;
  BoundaryVerdict out;
  out.normal = Vector(d);
  for (int i = 0; i < d; ++i) {
    const Vector e = Vector::Unit(d, i);
    out.normal[i] = (-f(2 * h * e) + 8 * f(h * e) - 8 * f(-h * e) + f(-2 * h * e)) / (12 * h);
  }
  if (!(out.normal.norm() >= 1e-12)) {
    fail(ErrorKind::DegenerateGradient, "boundary differential vanishes at g0");
  }
  const Vector nu = out.normal / out.normal.norm();
  const RealMatrix hbasis = complement(nu);
  for (Eigen::Index i = 0; i < hbasis.cols(); ++i) out.subalgebra.push_back(hbasis.col(i));
  out.closure = subalgebra_check(basis, out.subalgebra, options.tol);

  if (hbasis.cols() > 0) {
    Rng rng = make_rng(options.seed, 0x41444A54ULL);  // "ADJT"
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < options.samples; ++s) {
      Vector w(hbasis.cols());
      for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
      Vector x = hbasis * (w / w.norm()) * options.radius * unif(rng);
      // Slide along nu onto the translated boundary {f = 0}.
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        const double v = f(x);
        if (std::abs(v) <= 1e-13) {
          converged = true;
          break;
        }
        const double slope = (f(x + h * nu) - f(x - h * nu)) / (2 * h);
        if (slope == 0.0 || !std::isfinite(slope)) break;
        x -= (v / slope) * nu;
      }
      if (!converged) continue;
      ++out.ad_samples;
      const RealMatrix g = basis.element(x).exp();
      const RealMatrix gi = g.inverse();
      double worst = 0.0;
      for (Eigen::Index i = 0; i < hbasis.cols(); ++i) {
        const Vector ad = basis.coordinates(g * basis.element(hbasis.col(i)) * gi);
        worst = std::max(worst, std::abs(nu.dot(ad)));
      }
      out.max_ad_residual = std::max(out.max_ad_residual, worst);
      if (worst > options.tol) out.witnesses.push_back(x);
    }
  }
  out.pass = out.closure.ok && out.max_ad_residual <= options.tol;
  return out;
}

}  // namespace schurlab
