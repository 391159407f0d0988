#include "schurlab/groups.hpp"

#include <cmath>
#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/multiplier.hpp"
#include "schurlab/parallel.hpp"
#include "schurlab/random.hpp"

namespace schurlab {

namespace {

constexpr double kGroupTolerance = 1e-10;
constexpr double kBand = 1e-9;

RealMatrix mat2(double a, double b, double c, double d) {
  RealMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

void same_group(const GroupElement& g, const GroupElement& h) {
  if (g.group() != h.group() || g.order() != h.order()) {
    fail(ErrorKind::GroupMismatch, std::string("cannot combine elements of ") + to_string(g.group()) +
                                       " and " + to_string(h.group()));
  }
}

// exp of [[h, e], [f, -h]]: X^2 = (h^2 + e f) I.
GroupElement sl2_exp(double h, double e, double f) {
  const double delta = h * h + e * f;
  double c = 1.0;
  double s = 1.0;
  if (delta > 1e-300) {
    const double r = std::sqrt(delta);
    c = std::cosh(r);
    s = std::sinh(r) / r;
  } else if (delta < -1e-300) {
    const double r = std::sqrt(-delta);
    c = std::cos(r);
    s = std::sin(r) / r;
  }
  return GroupElement::sl2r(c + s * h, s * e, s * f, c - s * h);
}

}  // namespace

const char* to_string(GroupId g) noexcept {
  switch (g) {
    case GroupId::Real: return "real";
    case GroupId::AffinePlus: return "affine";
    case GroupId::SL2R: return "sl2r";
    case GroupId::SO3: return "so3";
    case GroupId::Heisenberg3: return "heisenberg3";
    case GroupId::Cyclic: return "cyclic";
  }
  return "real";
}

std::optional<GroupId> parse_group(const std::string& name) {
  for (GroupId g : {GroupId::Real, GroupId::AffinePlus, GroupId::SL2R, GroupId::SO3,
                    GroupId::Heisenberg3, GroupId::Cyclic}) {
    if (name == to_string(g)) return g;
  }
  return std::nullopt;
}

GroupElement GroupElement::real(double t) {
  if (!std::isfinite(t)) fail(ErrorKind::NonFinite, "group coordinate must be finite");
  return GroupElement(GroupId::Real, mat2(1.0, t, 0.0, 1.0));
}

GroupElement GroupElement::affine(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) fail(ErrorKind::NonFinite, "group coordinate must be finite");
  if (!(a > 0.0)) fail(ErrorKind::InvalidArgument, "affine elements need a > 0");
  return GroupElement(GroupId::AffinePlus, mat2(a, b, 0.0, 1.0));
}

GroupElement GroupElement::sl2r(double a, double b, double c, double d) {
  const RealMatrix m = mat2(a, b, c, d);
  if (!m.allFinite()) fail(ErrorKind::NonFinite, "group coordinate must be finite");
  if (std::abs(a * d - b * c - 1.0) > kGroupTolerance * std::max(1.0, m.squaredNorm())) {
    fail(ErrorKind::InvalidArgument, "SL2R elements need determinant 1");
  }
  return GroupElement(GroupId::SL2R, m);
}

GroupElement GroupElement::so3(const RealMatrix& r) {
  if (r.rows() != 3 || r.cols() != 3) fail(ErrorKind::DimensionMismatch, "SO3 elements are 3x3");
  if (!r.allFinite()) fail(ErrorKind::NonFinite, "group coordinate must be finite");
  if ((r.transpose() * r - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() > kGroupTolerance ||
      std::abs(r.determinant() - 1.0) > kGroupTolerance) {
    fail(ErrorKind::InvalidArgument, "SO3 elements must be orthogonal with determinant 1");
  }
  return GroupElement(GroupId::SO3, r);
}

GroupElement GroupElement::heisenberg(double x, double y, double z) {
  RealMatrix m = RealMatrix::Identity(3, 3);
  m(0, 1) = x;
  m(1, 2) = y;
  m(0, 2) = z;
  if (!m.allFinite()) fail(ErrorKind::NonFinite, "group coordinate must be finite");
  return GroupElement(GroupId::Heisenberg3, m);
}

GroupElement GroupElement::cyclic(long long k, int order) {
  if (order < 1) fail(ErrorKind::InvalidArgument, "cyclic group order must be positive");
  const long long r = ((k % order) + order) % order;
  return GroupElement(GroupId::Cyclic, RealMatrix(), r, order);
}

GroupElement GroupElement::identity(GroupId group, int order) {
  switch (group) {
    case GroupId::Real: return real(0.0);
    case GroupId::AffinePlus: return affine(1.0, 0.0);
    case GroupId::SL2R: return sl2r(1.0, 0.0, 0.0, 1.0);
    case GroupId::SO3: return so3(RealMatrix::Identity(3, 3));
    case GroupId::Heisenberg3: return heisenberg(0.0, 0.0, 0.0);
    case GroupId::Cyclic: return cyclic(0, order);
  }
  return real(0.0);
}

GroupElement GroupElement::from_matrix(GroupId group, const RealMatrix& m) {
  const auto near = [](double a, double b) { return std::abs(a - b) <= kGroupTolerance; };
  switch (group) {
    case GroupId::Real:
    case GroupId::AffinePlus:
      if (m.rows() != 2 || m.cols() != 2 || !near(m(1, 0), 0.0) || !near(m(1, 1), 1.0) ||
          (group == GroupId::Real && !near(m(0, 0), 1.0))) {
        fail(ErrorKind::InvalidArgument, "matrix is not in the requested group");
      }
      return group == GroupId::Real ? real(m(0, 1)) : affine(m(0, 0), m(0, 1));
    case GroupId::SL2R:
      if (m.rows() != 2 || m.cols() != 2) fail(ErrorKind::DimensionMismatch, "SL2R elements are 2x2");
      return sl2r(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    case GroupId::SO3:
      return so3(m);
    case GroupId::Heisenberg3:
      if (m.rows() != 3 || m.cols() != 3 || !near(m(0, 0), 1.0) || !near(m(1, 1), 1.0) ||
          !near(m(2, 2), 1.0) || !near(m(1, 0), 0.0) || !near(m(2, 0), 0.0) || !near(m(2, 1), 0.0)) {
        fail(ErrorKind::InvalidArgument, "matrix is not upper unitriangular");
      }
      return heisenberg(m(0, 1), m(1, 2), m(0, 2));
    case GroupId::Cyclic:
      fail(ErrorKind::InvalidArgument, "cyclic elements have no matrix form");
  }
  fail(ErrorKind::InvalidArgument, "unknown group");
}

std::vector<double> GroupElement::coordinates() const {
  switch (group_) {
    case GroupId::Real: return {matrix_(0, 1)};
    case GroupId::AffinePlus: return {matrix_(0, 0), matrix_(0, 1)};
    case GroupId::SL2R: return {matrix_(0, 0), matrix_(0, 1), matrix_(1, 0), matrix_(1, 1)};
    case GroupId::SO3: {
      std::vector<double> out;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) out.push_back(matrix_(i, j));
      }
      return out;
    }
    case GroupId::Heisenberg3: return {matrix_(0, 1), matrix_(1, 2), matrix_(0, 2)};
    case GroupId::Cyclic: return {static_cast<double>(residue_)};
  }
  return {};
}

GroupElement group_op(const GroupElement& g, const GroupElement& h) {
  same_group(g, h);
  switch (g.group()) {
    case GroupId::Cyclic: return GroupElement::cyclic(g.residue() + h.residue(), g.order());
    case GroupId::Real: return GroupElement::real(g.matrix()(0, 1) + h.matrix()(0, 1));
    case GroupId::AffinePlus: {
      const RealMatrix& a = g.matrix();
      const RealMatrix& b = h.matrix();
      return GroupElement::affine(a(0, 0) * b(0, 0), a(0, 0) * b(0, 1) + a(0, 1));
    }
    case GroupId::Heisenberg3: {
      const RealMatrix m = g.matrix() * h.matrix();
      return GroupElement::heisenberg(m(0, 1), m(1, 2), m(0, 2));
    }
    case GroupId::SL2R: {
      const RealMatrix m = g.matrix() * h.matrix();
      return GroupElement::sl2r(m(0, 0), m(0, 1), m(1, 0), m(1, 1));
    }
    case GroupId::SO3: {
      // Re-orthonormalize so long products stay on the group.
      const RealMatrix m = g.matrix() * h.matrix();
      Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      return GroupElement::so3(svd.matrixU() * svd.matrixV().transpose());
    }
  }
  fail(ErrorKind::InvalidArgument, "unknown group");
}

GroupElement group_inv(const GroupElement& g) {
  const RealMatrix& m = g.matrix();
  switch (g.group()) {
    case GroupId::Cyclic: return GroupElement::cyclic(-g.residue(), g.order());
    case GroupId::Real: return GroupElement::real(-m(0, 1));
    case GroupId::AffinePlus: return GroupElement::affine(1.0 / m(0, 0), -m(0, 1) / m(0, 0));
    case GroupId::SL2R: return GroupElement::sl2r(m(1, 1), -m(0, 1), -m(1, 0), m(0, 0));
    case GroupId::SO3: return GroupElement::so3(m.transpose());
    case GroupId::Heisenberg3:
      return GroupElement::heisenberg(-m(0, 1), -m(1, 2), m(0, 1) * m(1, 2) - m(0, 2));
  }
  fail(ErrorKind::InvalidArgument, "unknown group");
}

double act_on_line(const GroupElement& g, double t) {
  const RealMatrix& m = g.matrix();
  switch (g.group()) {
    case GroupId::Real: return t + m(0, 1);
    case GroupId::AffinePlus: return m(0, 0) * t + m(0, 1);
    case GroupId::SL2R: {
      // Chart branch: the denominator must stay positive.
      const double den = m(1, 0) * t + m(1, 1);
      if (!(den > 1e-12)) fail(ErrorKind::ChartOverflow, "fractional-linear action hits its pole");
      const double v = (m(0, 0) * t + m(0, 1)) / den;
      if (!std::isfinite(v)) fail(ErrorKind::ChartOverflow, "fractional-linear action overflows");
      return v;
    }
    default:
      fail(ErrorKind::InvalidArgument, std::string(to_string(g.group())) + " does not act on the line");
  }
}

Matrix herz_schur_matrix(const GroupSymbol& m, const std::vector<GroupElement>& grid) {
  if (grid.empty()) fail(ErrorKind::ShapeInvalid, "grid must be nonempty");
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::vector<GroupElement> inverses;
  inverses.reserve(grid.size());
  for (const auto& g : grid) inverses.push_back(group_inv(g));
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = m(group_op(grid[static_cast<std::size_t>(i)], inverses[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

double sl2r_m0(const GroupElement& g) {
  if (g.group() != GroupId::SL2R) fail(ErrorKind::GroupMismatch, "m0 is a symbol on SL2R");
  const RealMatrix& m = g.matrix();
  const double s = m(0, 0) * m(1, 0) + m(0, 1) * m(1, 1);
  return 0.5 * (1.0 + (s > 0.0) - (s < 0.0));
}

double sl2r_sgn_c(const GroupElement& g) {
  if (g.group() != GroupId::SL2R) fail(ErrorKind::GroupMismatch, "sgn_c is a symbol on SL2R");
  const double c = g.matrix()(1, 0);
  return 0.5 * (1.0 + (c > 0.0) - (c < 0.0));
}

double half_line_symbol(const GroupElement& g) { return act_on_line(g, 0.0) > 0.0 ? 1.0 : 0.0; }

CotlarResult cotlar_pointwise_check(GroupId group, int samples, std::uint64_t seed, int jobs) {
  if (group != GroupId::Real && group != GroupId::AffinePlus && group != GroupId::SL2R) {
    fail(ErrorKind::InvalidArgument, std::string(to_string(group)) + " has no action on the line");
  }
  if (samples < 0) fail(ErrorKind::InvalidArgument, "samples must be nonnegative");
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (static_cast<std::size_t>(samples) + kBlock - 1) / kBlock;
  std::vector<CotlarResult> partial(blocks);
  parallel_for(blocks, jobs, [&](std::size_t b) {
    Rng rng = make_rng(seed, 0x434F544CULL, b);  // "COTL"
    std::uniform_real_distribution<double> wide(-4.0, 4.0);
    std::uniform_real_distribution<double> log_a(-2.0, 2.0);
    std::uniform_real_distribution<double> local(-0.5, 0.5);
    const auto draw = [&]() {
      switch (group) {
        case GroupId::Real: return GroupElement::real(wide(rng));
        case GroupId::AffinePlus: return GroupElement::affine(std::exp(log_a(rng)), wide(rng));
        default: {
          const double h = local(rng);
          const double e = local(rng);
          const double f = local(rng);
          return sl2_exp(h, e, f);
        }
      }
    };
    CotlarResult& r = partial[b];
    const std::size_t end = std::min(static_cast<std::size_t>(samples), (b + 1) * kBlock);
    for (std::size_t s = b * kBlock; s < end; ++s) {
      const GroupElement g = draw();
      const GroupElement h = draw();
      try {
        const double alpha = act_on_line(g, 0.0);
        const double beta = act_on_line(h, 0.0);
        if (std::abs(alpha) < kBand || std::abs(beta) < kBand || std::abs(alpha - beta) < kBand) {
          ++r.rejected;
          continue;
        }
        const GroupElement gi = group_inv(g);
        const GroupElement gih = group_op(gi, h);
        const double lhs = half_line_symbol(gi) * half_line_symbol(gih);
        const double rhs = half_line_symbol(h) * half_line_symbol(gi) +
                           half_line_symbol(group_inv(h)) * half_line_symbol(gih);
        ++r.checked;
        if (lhs != rhs) ++r.failures;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ChartOverflow) throw;
        ++r.rejected;
      }
    }
  });
  CotlarResult total;
  for (const auto& r : partial) {
    total.failures += r.failures;
    total.checked += r.checked;
    total.rejected += r.rejected;
  }
  return total;
}

TransferenceResult fourier_multiplier_norm_finite_cyclic(const Eigen::VectorXcd& m, double p,
                                                         int budget, std::uint64_t seed, int jobs) {
  const Eigen::Index n = m.size();
  if (n < 1 || n > 512) fail(ErrorKind::InvalidArgument, "group order must be in 1..512");
  if (budget < 1) fail(ErrorKind::InvalidArgument, "budget must be at least 1");
  conjugate_exponent(p);
  const Matrix symbol = herz_schur_cyclic(m);
  require_finite(symbol, "symbol");

  // Circulants are invariant under the duality ascent for a Herz-Schur
  // symbol, so ascending from circulant starts searches T_m on circulants.
  std::vector<Eigen::VectorXcd> starts;
  starts.push_back(Eigen::VectorXcd::Unit(n, 0));
  starts.push_back(Eigen::VectorXcd::Ones(n));
  for (int t = 0; t < budget; ++t) {
    Rng rng = make_rng(seed, 0x46524E54ULL, static_cast<std::uint64_t>(t));  // "FRNT"
    starts.push_back(complex_gaussian(n, 1, rng).col(0));
  }
  std::vector<NormEstimate> found(starts.size());
  parallel_for(starts.size(), jobs, [&](std::size_t i) {
    NormEstimate e = ascend_multiplier_ratio(symbol, circulant(starts[i]), p, 50);
    // Project back onto circulants to remove round-off drift, then rescore.
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) f[((r - c) % n + n) % n] += e.maximizer(r, c);
    }
    f /= static_cast<double>(n);
    const Matrix x = circulant(f);
    found[i].maximizer = x;
    found[i].value = multiplier_ratio(symbol, x, p);
  });
  TransferenceResult out;
  std::size_t best = 0;
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].value > found[best].value) best = i;
  }
  out.fourier_lb = found[best].value;
  out.fourier_maximizer = found[best].maximizer;

  NormEstimatorOptions options;
  options.budget = budget;
  options.seed = seed;
  options.jobs = jobs;
  out.schur_lb = estimate_multiplier_norm(symbol, p, options, {out.fourier_maximizer}).value;
  return out;
}

}  // namespace schurlab
