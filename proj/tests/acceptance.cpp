// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "schurlab/errors.hpp"
#include "schurlab/geometry.hpp"
#include "schurlab/groups.hpp"
#include "schurlab/harmonic.hpp"
#include "schurlab/io.hpp"
#include "schurlab/multiplier.hpp"
#include "schurlab/symbols.hpp"

using namespace schurlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Named {
  SymbolSpec spec;
  Verdict expected;
};

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<Named> verdict_suite() {
  return {
      {make_ball(1), Verdict::TriangularModel},
      {make_ball(2), Verdict::TriangularModel},
      {make_ball(3), Verdict::TriangularModel},
      {make_halfspace(vec({1.0, -0.4}), vec({0.7, 0.2}), 0.1), Verdict::TriangularModel},
      {make_sphere_delta(1, -0.5), Verdict::TriangularModel},
      {make_sphere_delta(1, 0.0), Verdict::TriangularModel},
      {make_sphere_delta(1, 0.5), Verdict::TriangularModel},
      {make_degenerate(2, 2), Verdict::TriangularModel},
      {make_sphere_delta(2, 0.0), Verdict::CurvatureFail},
      {make_sphere_delta(2, 0.3), Verdict::CurvatureFail},
      {make_sphere_delta(3, 0.0), Verdict::CurvatureFail},
  };
}

std::vector<SymbolSpec> all_builtins() {
  std::vector<SymbolSpec> out;
  for (const Named& n : verdict_suite()) out.push_back(n.spec);
  out.push_back(make_halfspace(vec({1.0}), vec({2.0})));
  out.push_back(make_toeplitz_ball(1));
  out.push_back(make_toeplitz_ball(2));
  out.push_back(make_triangular());
  return out;
}

Outcome verdicts() {
  const auto t0 = Clock::now();
  int wrong = 0;
  std::string bad;
  const auto suite = verdict_suite();
  for (const Named& n : suite) {
    ClassifyOptions opts;
    opts.samples = 64;
    const ClassificationReport r = classify(n.spec, {}, {}, opts);
    if (r.verdict != n.expected) {
      ++wrong;
      bad += " " + n.spec.id() + "=" + to_string(r.verdict);
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << suite.size() << " symbols, " << wrong << " misclassified," << bad << " " << secs << " s";
  return {wrong == 0 && secs < 10.0, d.str()};
}

Outcome c1_c2_agreement() {
  int disagreements = 0;
  int transverse = 0;
  int c2_symbols = 0;
  std::string bad;
  for (const SymbolSpec& s : all_builtins()) {
    ClassifyOptions opts;
    opts.samples = 64;
    const ClassificationReport r = classify(s, {}, {}, opts);
    transverse += r.transverse_samples;
    c2_symbols += r.c2_checked ? 1 : 0;
    if (r.disagreements > 0) bad += " " + s.id();
    disagreements += r.disagreements;
  }
  std::ostringstream d;
  d << transverse << " transverse samples over " << c2_symbols << " C2 symbols, " << disagreements
    << " disagreements" << bad;
  return {disagreements == 0 && transverse > 0, d.str()};
}

Outcome p2_exactness() {
  Rng rng(20240601);
  std::uniform_int_distribution<int> size(1, 64);
  std::bernoulli_distribution coin(0.5);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const int rows = size(rng);
    const int cols = size(rng);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) m(i, j) = coin(rng) ? 1.0 : 0.0;
    }
    const double sup = m.cwiseAbs().maxCoeff();
    const double lb = multiplier_norm_lower_bound(m, 2.0, 4, static_cast<std::uint64_t>(t));
    worst = std::max(worst, std::abs(lb - sup));
  }
  std::ostringstream d;
  d << "20 random 0/1 matrices, max |lb - sup|M|| = " << worst;
  return {worst <= 1e-9, d.str()};
}

Outcome triangular_probe() {
  const auto t0 = Clock::now();
  const SymbolSpec tri = make_triangular();
  SamplerConfig sampler;
  sampler.grid = GridKind::Index;
  sampler.budget = 4;
  const auto p4 = norm_growth_experiment(tri, 4.0, {8, 16, 32, 64}, sampler, 7);
  bool monotone = true;
  for (std::size_t i = 1; i < p4.size(); ++i) monotone = monotone && p4[i].lower_bound >= p4[i - 1].lower_bound;
  const double ratio = p4[3].lower_bound / p4[2].lower_bound;

  sampler.budget = 2;
  const auto pinf = norm_growth_experiment(tri, kInfinity, {8, 16, 32, 64, 128, 256}, sampler, 7);
  bool increasing = true;
  for (std::size_t i = 1; i < pinf.size(); ++i) {
    increasing = increasing && pinf[i].lower_bound > pinf[i - 1].lower_bound;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "p=4 monotone=" << monotone << " ratio64/32=" << ratio << "; p=inf strictly increasing=" << increasing
    << " (" << pinf.front().lower_bound << " .. " << pinf.back().lower_bound << "), " << secs << " s";
  return {monotone && ratio <= 1.10 && increasing && secs < 60.0, d.str()};
}

Outcome cotlar() {
  bool ok = true;
  std::ostringstream d;
  for (GroupId g : {GroupId::Real, GroupId::AffinePlus, GroupId::SL2R}) {
    const auto t0 = Clock::now();
    const CotlarResult r = cotlar_pointwise_check(g, 100000, 11);
    const double secs = seconds_since(t0);
    ok = ok && r.failures == 0 && r.checked > 0 && secs < 5.0;
    d << to_string(g) << ": " << r.failures << " failures / " << r.checked << " checked (" << secs << " s); ";
  }
  return {ok, d.str()};
}

Vector unit_vector(int n, int i) {
  Vector v = Vector::Zero(n);
  v[i] = 1.0;
  return v;
}

Outcome subalgebras() {
  bool ok = true;
  std::ostringstream d;
  const LieAlgebraBasis sl2 = lie_algebra("sl2");
  ok = ok && subalgebra_check(sl2, {unit_vector(3, 0), unit_vector(3, 1)}).ok;
  const LieAlgebraBasis h3 = lie_algebra("heisenberg3");
  ok = ok && subalgebra_check(h3, {unit_vector(3, 0), unit_vector(3, 2)}).ok;
  ok = ok && subalgebra_check(h3, {unit_vector(3, 1), unit_vector(3, 2)}).ok;
  d << "sl2/h3 pass=" << ok;

  Rng rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  bool abelian_ok = true;
  for (int n = 2; n <= 5; ++n) {
    const LieAlgebraBasis ab = lie_algebra("abelian", n);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Vector> hyperplane;
      for (int k = 0; k + 1 < n; ++k) {
        Vector v(n);
        for (int i = 0; i < n; ++i) v[i] = normal(rng);
        hyperplane.push_back(v);
      }
      abelian_ok = abelian_ok && subalgebra_check(ab, hyperplane).ok;
    }
  }
  d << ", abelian hyperplanes pass=" << abelian_ok;

  const LieAlgebraBasis so3 = lie_algebra("so3");
  int so3_fail = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Vector a(3);
    Vector b(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = normal(rng);
      b[i] = normal(rng);
    }
    so3_fail += subalgebra_check(so3, {a, b}).ok ? 0 : 1;
  }
  d << ", so3 random planes failing: " << so3_fail << "/20";
  return {ok && abelian_ok && so3_fail == 20, d.str()};
}

// Transverse boundary points scattered around the anchor.
std::vector<BoundaryPoint> transverse_points(const SymbolSpec& s, int count, std::uint64_t seed) {
  std::vector<BoundaryPoint> out;
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const BoundaryPoint base = boundary_project(s, s.anchor_x(), s.anchor_y(), ProjectDirection::Both);
  for (int attempt = 0; attempt < 50 * count && static_cast<int>(out.size()) < count; ++attempt) {
    Point x = base.x;
    Point y = base.y;
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += 0.1 * s.box_x()[static_cast<std::size_t>(i)].width() * u(rng);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += 0.1 * s.box_y()[static_cast<std::size_t>(i)].width() * u(rng);
    try {
      if (!s.in_domain(x, y)) continue;
      const BoundaryPoint z = boundary_project(s, x, y, ProjectDirection::Both);
      if (s.in_domain(z.x, z.y) && transversality_check(z, 1e-3)) out.push_back(z);
    } catch (const Error&) {
    }
  }
  return out;
}

Outcome scaling_limit() {
  bool ok = true;
  std::ostringstream d;
  for (const SymbolSpec& s : {make_ball(2), make_sphere_delta(2, 0.3)}) {
    const auto pts = transverse_points(s, 10, 5);
    double worst = 1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const RealMatrix t = solve_T(pts[i].n1, pts[i].n2);
      const ScalingLimitResult r = scaling_limit_check(s, pts[i], t, {1e-3}, 1000, 100 + i);
      worst = std::min(worst, r.fraction);
    }
    ok = ok && pts.size() == 10 && worst >= 0.99;
    d << s.id() << ": " << pts.size() << " points, min agreement " << worst << "; ";
  }
  return {ok, d.str()};
}

Outcome transference() {
  Rng rng(2024);
  std::bernoulli_distribution coin(0.5);
  int violations = 0;
  int runs = 0;
  double worst = 0.0;
  for (int n : {8, 16, 32}) {
    for (double p : {4.0 / 3.0, 4.0}) {
      for (int trial = 0; trial < 30; ++trial) {
        Eigen::VectorXcd m(n);
        for (int i = 0; i < n; ++i) m[i] = coin(rng) ? 1.0 : 0.0;
        const TransferenceResult r = fourier_multiplier_norm_finite_cyclic(m, p, 2, static_cast<std::uint64_t>(trial));
        ++runs;
        if (r.schur_lb > 0.0) worst = std::max(worst, r.fourier_lb / r.schur_lb);
        if (!(r.fourier_lb <= r.schur_lb * (1.0 + 1e-9))) ++violations;
      }
    }
  }
  std::ostringstream d;
  d << runs << " (m, N, p) cases, " << violations << " violations, max fourier/schur = " << worst;
  return {violations == 0, d.str()};
}

Outcome intertwining() {
  Rng rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.05, 2.0);
  std::bernoulli_distribution coin(0.5);
  const int n = 8;
  const double ps[] = {1.0, 4.0 / 3.0, 2.0, 4.0, kInfinity};
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXcd c(n);
    Eigen::VectorXcd m(n);
    Vector phi(n);
    Vector psi(n);
    for (int i = 0; i < n; ++i) {
      c[i] = Complex(normal(rng), normal(rng));
      m[i] = coin(rng) ? 1.0 : 0.0;
      phi[i] = weight(rng);
      psi[i] = weight(rng);
    }
    const double p = ps[t % 5];
    const Matrix x = circulant(c);
    const Matrix lhs = compression_jp(fourier_multiplier_cyclic(x, m), phi, psi, p);
    const Matrix rhs = schur_product(herz_schur_cyclic(m), compression_jp(x, phi, psi, p));
    worst = std::max(worst, (lhs - rhs).norm());
  }
  std::ostringstream d;
  d << "100 triples on Z_8, max Frobenius gap " << worst;
  return {worst <= 1e-12, d.str()};
}

Outcome pullback_invariance() {
  int changed = 0;
  int checked = 0;
  std::string bad;
  for (const SymbolSpec& s : all_builtins()) {
    const Verdict base = classify(s).verdict;
    for (std::uint64_t k = 0; k < 5; ++k) {
      const SymbolSpec pulled =
          pullback_symbol(s, random_reparam(s.m_dim(), 1000 + k), random_reparam(s.n_dim(), 2000 + k));
      const Verdict v = classify(pulled).verdict;
      ++checked;
      if (v != base) {
        ++changed;
        bad += " " + s.id() + "#" + std::to_string(k) + "=" + to_string(v);
      }
    }
  }
  std::ostringstream d;
  d << checked << " reparametrized symbols, " << changed << " verdict changes" << bad;
  return {changed == 0, d.str()};
}

// Drops every "wall_ms" member so that timings do not enter the comparison.
std::string strip_timing(const std::string& text, bool csv) {
  if (csv) {
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  }
  if (text.empty() || text.front() != '{') return text;
  std::function<void(Json&)> drop = [&](Json& j) {
    if (j.is_object()) {
      j.erase("wall_ms");
      for (auto& [k, v] : j.items()) drop(v);
    } else if (j.is_array()) {
      for (auto& v : j) drop(v);
    }
  };
  Json j = Json::parse(text);
  drop(j);
  return j.dump();
}

Outcome determinism(const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("schur_lab_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  struct Case {
    std::string command;
    std::string config;
    std::string format;
  };
  const std::vector<Case> cases = {
      {"classify", R"({"symbol":{"m_dim":2,"n_dim":2,"builtin":"sphere_delta","params":{"n":2,"delta":0.3}},"seed":3})", "json"},
      {"classify", R"({"symbol":{"m_dim":1,"n_dim":1,"expr":"x1^2 + y1^2 - 0.5","box":[[-1,1],[-1,1]]},"seed":4})", "json"},
      {"norms", R"({"symbol":{"m_dim":1,"n_dim":1,"builtin":"triangular"},"p":4,"sizes":[8,16],"grid":"index","seed":5})", "json"},
      {"norms", R"({"symbol":{"m_dim":2,"n_dim":2,"builtin":"ball","params":{"n":2}},"p":3,"sizes":[8,16],"seed":5})", "csv"},
      {"norms", R"({"symbol":{"m_dim":1,"n_dim":1,"builtin":"triangular"},"p":"inf","sizes":[8,16],"grid":"index"})", "svg"},
      {"squarefn", R"({"shape":[16,16],"directions":[[1,0],[1,1]],"p":4,"C":2,"seed":6})", "json"},
      {"cotlar", R"({"group":"sl2r","samples":20000,"seed":7,"jobs":2})", "json"},
      {"groupcheck", R"({"group":"sl2r","symbol":"m0","seed":8})", "json"},
      {"groupcheck", R"({"algebra":"so3","subspace":[[1,0,0],[0,1,0]]})", "json"},
      {"transfer", R"({"N":16,"p":4,"symbol":"random","seed":9})", "json"},
  };
  int mismatches = 0;
  int failures = 0;
  std::string bad;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const fs::path cfg = dir / ("case" + std::to_string(i) + ".json");
    std::ofstream(cfg) << cases[i].config;
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / ("out" + std::to_string(i) + "_" + std::to_string(run));
      const std::string cmd = "\"" + cli + "\" " + cases[i].command + " --config \"" + cfg.string() +
                              "\" --format " + cases[i].format + " --out \"" + out.string() + "\"";
      if (std::system(cmd.c_str()) != 0) {
        ++failures;
        bad += " " + cases[i].command + "#" + std::to_string(i);
        break;
      }
      std::ifstream in(out, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      outputs[run] = strip_timing(ss.str(), cases[i].format == "csv");
    }
    if (outputs[0] != outputs[1]) {
      ++mismatches;
      bad += " " + cases[i].command + "#" + std::to_string(i);
    }
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  std::ostringstream d;
  d << cases.size() << " CLI configs run twice, " << mismatches << " differ, " << failures << " failed" << bad;
  return {mismatches == 0 && failures == 0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "schur-lab";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"verdict_suite", verdicts},
      {"c1_c2_agreement", c1_c2_agreement},
      {"p2_exactness", p2_exactness},
      {"triangular_probe", triangular_probe},
      {"cotlar_identity", cotlar},
      {"subalgebra_criterion", subalgebras},
      {"scaling_limit", scaling_limit},
      {"transference", transference},
      {"intertwining", intertwining},
      {"pullback_invariance", pullback_invariance},
      {"cli_determinism", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) o.detail.pop_back();
    std::printf("%s %2zu %-22s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
