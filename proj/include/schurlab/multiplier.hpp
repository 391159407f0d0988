#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "schurlab/matcore.hpp"
#include "schurlab/symbols.hpp"

namespace schurlab {

using Grid = std::vector<Point>;

/// M(i, j) = evaluate_symbol(spec, grid_x[i], grid_y[j]) as a 0/1 matrix.
Matrix discretize_symbol(const SymbolSpec& spec, const Grid& grid_x, const Grid& grid_y);

/// Points 1, 2, ..., N on the line.
Grid index_grid(int n);

/// Radical-inverse value of `index` in base `base`.
double radical_inverse(std::uint64_t index, int base);

/// First N Halton points (indices 1..N) mapped affinely into `box`; the bases
/// are the primes starting at position `prime_offset`. Grids of different
/// sizes are nested by prefix.
Grid halton_grid(const Box& box, int n, int prime_offset = 0);

enum class GridKind { Index, Halton };

const char* to_string(GridKind k) noexcept;

struct SamplerConfig {
  GridKind grid = GridKind::Halton;
  int budget = 8;
  int ascent_steps = 50;
  int jobs = 1;
};

struct NormGrowthRecord {
  std::string symbol_id;
  double p = 2.0;
  int n = 0;
  double lower_bound = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

/// x grid and y grid of size N used by the experiment for `spec`.
std::pair<Grid, Grid> experiment_grids(const SymbolSpec& spec, GridKind kind, int n);

/// One record per N. Each size reuses the previous maximizer (zero padded) as
/// a warm start, so on nested grids the bounds never decrease.
std::vector<NormGrowthRecord> norm_growth_experiment(const SymbolSpec& spec, double p,
                                                     const std::vector<int>& sizes,
                                                     const SamplerConfig& sampler,
                                                     std::uint64_t seed);

struct GrowthSummary {
  double slope_per_doubling = 0.0;  // least squares slope of the bound against log2 N
  double threshold = 0.05;
  bool growing = false;
};

GrowthSummary summarize_growth(const std::vector<NormGrowthRecord>& records,
                               double threshold = 0.05);

/// Diffeomorphism of a chart given with its Jacobian and inverse. Maps are
/// increasing in each coordinate, so box preimages are boxes.
struct Reparam {
  std::string name;
  int dim = 1;
  std::function<Point(const Point&)> forward;
  std::function<RealMatrix(const Point&)> jacobian;
  std::function<Point(const Point&)> inverse;
};

Reparam identity_reparam(int dim);
/// x -> scale .* x + shift with scale > 0.
Reparam affine_reparam(const Vector& scale, const Vector& shift);
/// x -> x + a x^3 componentwise, a >= 0.
Reparam cubic_reparam(int dim, double a);
/// r2 o r1.
Reparam compose(const Reparam& r1, const Reparam& r2);
/// Seeded composition of an affine and a cubic map.
Reparam random_reparam(int dim, std::uint64_t seed);

/// F'(x, y) = F(rx(x), ry(y)) on the preimage boxes, with chain-rule
/// derivatives.
SymbolSpec pullback_symbol(const SymbolSpec& spec, const Reparam& rx, const Reparam& ry);

/// C(i, j) = c((i - j) mod N): the image of c under the left regular
/// representation of Z_N.
Matrix circulant(const Eigen::VectorXcd& c);
bool is_circulant(const Matrix& x, double tol = 0.0);

/// Herz-Schur symbol M(g, h) = m(g - h) on Z_N.
Matrix herz_schur_cyclic(const Eigen::VectorXcd& m);

/// T_m on circulants: lambda(f) -> lambda(m f).
Matrix fourier_multiplier_cyclic(const Matrix& x, const Eigen::VectorXcd& m);

/// diag(phi^{1/p}) x diag(psi^{1/p}); at p = inf the weights become
/// indicators of their supports.
Matrix compression_jp(const Matrix& x, const Vector& phi, const Vector& psi, double p);

}  // namespace schurlab
