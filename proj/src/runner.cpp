#include "schurlab/runner.hpp"

#include <cmath>
#include <string>

#include "schurlab/errors.hpp"
#include "schurlab/expr.hpp"
#include "schurlab/groups.hpp"
#include "schurlab/harmonic.hpp"

namespace schurlab {

namespace {

constexpr std::uint64_t kSquareFnStream = 0x5351'4E46ULL;   // "SQNF"
constexpr std::uint64_t kTransferStream = 0x5452'4E53ULL;   // "TRNS"

[[noreturn]] void invalid(const std::string& msg) { fail(ErrorKind::ConfigInvalid, msg); }

int get_int(const Json& c, const char* key, int fallback) {
  return c.contains(key) ? c.at(key).get<int>() : fallback;
}

Json header(const std::string& command, std::uint64_t seed) {
  Json r;
  r["schema"] = kSchemaVersion;
  r["command"] = command;
  r["seed"] = seed;
  r["outcome"] = "pass";
  return r;
}

void set_outcome(RunResult& out, bool pass) {
  out.pass = pass;
  out.report["outcome"] = pass ? "pass" : "fail";
}

struct Context {
  const Json& config;
  std::uint64_t seed;
  int jobs;
};

RunResult run_classify(const Context& ctx) {
  const SymbolSpec spec = symbol_from_json(ctx.config.at("symbol"));
  std::optional<Point> x0;
  std::optional<Point> y0;
  if (ctx.config.contains("x0")) x0 = point_from_json(ctx.config.at("x0"));
  if (ctx.config.contains("y0")) y0 = point_from_json(ctx.config.at("y0"));
  if ((x0 && x0->size() != spec.m_dim()) || (y0 && y0->size() != spec.n_dim())) {
    invalid("x0/y0 dimensions do not match the symbol");
  }
  ClassifyOptions opts;
  opts.samples = get_int(ctx.config, "samples", opts.samples);
  opts.seed = ctx.seed;
  opts.jobs = ctx.jobs;
  const ClassificationReport rep = classify(spec, x0, y0, opts);

  RunResult out;
  out.report = header("classify", ctx.seed);
  out.report["symbol_id"] = spec.id();
  const Json body = to_json(rep);
  for (auto it = body.begin(); it != body.end(); ++it) out.report[it.key()] = it.value();
  set_outcome(out, rep.verdict == Verdict::TriangularModel);
  return out;
}

RunResult run_norms(const Context& ctx) {
  const SymbolSpec spec = symbol_from_json(ctx.config.at("symbol"));
  const double p = exponent_from_json(ctx.config.at("p"));
  const std::vector<int> sizes = ctx.config.at("sizes").get<std::vector<int>>();
  SamplerConfig sampler;
  if (ctx.config.contains("grid")) {
    sampler.grid = ctx.config.at("grid").get<std::string>() == "index" ? GridKind::Index : GridKind::Halton;
  }
  sampler.budget = get_int(ctx.config, "budget", sampler.budget);
  sampler.ascent_steps = get_int(ctx.config, "ascent_steps", sampler.ascent_steps);
  sampler.jobs = ctx.jobs;
  if (sampler.grid == GridKind::Index && (spec.m_dim() != 1 || spec.n_dim() != 1)) {
    invalid("the index grid needs a symbol on the line (m_dim = n_dim = 1)");
  }

  RunResult out;
  out.records = norm_growth_experiment(spec, p, sizes, sampler, ctx.seed);
  const GrowthSummary summary = summarize_growth(out.records);
  out.report = header("norms", ctx.seed);
  out.report["symbol_id"] = spec.id();
  out.report["p"] = exponent_to_json(p);
  out.report["grid"] = to_string(sampler.grid);
  Json records = Json::array();
  for (const auto& r : out.records) records.push_back(to_json(r));
  out.report["records"] = std::move(records);
  out.report["summary"] = {{"slope_per_doubling", summary.slope_per_doubling},
                           {"threshold", summary.threshold},
                           {"growing", summary.growing}};
  set_outcome(out, !summary.growing);
  return out;
}

RunResult run_squarefn(const Context& ctx) {
  const std::vector<int> shape = ctx.config.at("shape").get<std::vector<int>>();
  const double p = exponent_from_json(ctx.config.at("p"));
  const double c = ctx.config.at("C").get<double>();
  const int degree = get_int(ctx.config, "degree", 3);
  std::vector<Vector> us;
  for (const Json& u : ctx.config.at("directions")) {
    us.push_back(point_from_json(u));
    if (us.back().size() != static_cast<Eigen::Index>(shape.size())) {
      invalid("every direction needs one entry per grid axis");
    }
  }
  if (us.empty()) invalid("'directions' must not be empty");
  std::vector<GridFunction> fs;
  for (std::size_t j = 0; j < us.size(); ++j) {
    Rng rng = make_rng(ctx.seed, kSquareFnStream, j);
    fs.push_back(random_trig_polynomial(shape, degree, rng));
  }
  const SquareFunctionResult r = square_function_test(fs, us, p, c);

  RunResult out;
  out.report = header("squarefn", ctx.seed);
  out.report["shape"] = shape;
  out.report["degree"] = degree;
  out.report["directions"] = us.size();
  out.report["p"] = exponent_to_json(p);
  out.report["C"] = c;
  out.report["lhs"] = r.lhs;
  out.report["rhs"] = c * r.rhs;
  out.report["pass"] = r.pass;
  set_outcome(out, r.pass);
  return out;
}

RunResult run_cotlar(const Context& ctx) {
  const std::string name = ctx.config.at("group").get<std::string>();
  const GroupId group = *parse_group(name);
  const int samples = get_int(ctx.config, "samples", 100000);
  const CotlarResult r = cotlar_pointwise_check(group, samples, ctx.seed, ctx.jobs);

  RunResult out;
  out.report = header("cotlar", ctx.seed);
  out.report["group"] = name;
  out.report["samples"] = samples;
  out.report["checked"] = r.checked;
  out.report["rejected"] = r.rejected;
  out.report["failures"] = r.failures;
  set_outcome(out, r.failures == 0);
  return out;
}

GroupElement element_from_coordinates(GroupId group, const Vector& v) {
  const auto need = [&](Eigen::Index k) {
    if (v.size() != k) invalid("g0 needs " + std::to_string(k) + " coordinates for this group");
  };
  try {
    switch (group) {
      case GroupId::Real: need(1); return GroupElement::real(v[0]);
      case GroupId::AffinePlus: need(2); return GroupElement::affine(v[0], v[1]);
      case GroupId::SL2R: need(4); return GroupElement::sl2r(v[0], v[1], v[2], v[3]);
      case GroupId::SO3: {
        need(9);
        RealMatrix r(3, 3);
        for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = v[i];
        return GroupElement::so3(r);
      }
      case GroupId::Heisenberg3: need(3); return GroupElement::heisenberg(v[0], v[1], v[2]);
      case GroupId::Cyclic: break;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigInvalid) throw;
    invalid(std::string("invalid g0: ") + e.what());
  }
  invalid("unsupported group");
}

std::vector<std::string> coordinate_names(GroupId group) {
  switch (group) {
    case GroupId::Real: return {"t"};
    case GroupId::AffinePlus: return {"a", "b"};
    case GroupId::SL2R: return {"a", "b", "c", "d"};
    case GroupId::SO3: return {"r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32", "r33"};
    case GroupId::Heisenberg3: return {"x", "y", "z"};
    case GroupId::Cyclic: break;
  }
  return {};
}

struct BoundaryField {
  GroupSymbol field;
  std::optional<GroupElement> default_g0;
};

BoundaryField boundary_field(GroupId group, const std::string& symbol) {
  const auto coord = [](const GroupElement& g, int i) { return g.coordinates()[static_cast<std::size_t>(i)]; };
  if (symbol == "sgn_c") {
    if (group != GroupId::SL2R) invalid("'sgn_c' is a symbol on sl2r");
    return {[coord](const GroupElement& g) { return coord(g, 2); }, GroupElement::sl2r(2.0, 0.3, 0.0, 0.5)};
  }
  if (symbol == "m0") {
    if (group != GroupId::SL2R) invalid("'m0' is a symbol on sl2r");
    const double c = std::cos(0.4);
    const double s = std::sin(0.4);
    return {[coord](const GroupElement& g) { return coord(g, 0) * coord(g, 2) + coord(g, 1) * coord(g, 3); },
            GroupElement::sl2r(c, -s, s, c)};
  }
  if (symbol == "half_line") {
    if (group != GroupId::Real && group != GroupId::AffinePlus && group != GroupId::SL2R) {
      invalid("'half_line' needs a group acting on the line");
    }
    std::optional<GroupElement> g0;
    if (group == GroupId::Real) g0 = GroupElement::real(0.0);
    if (group == GroupId::AffinePlus) g0 = GroupElement::affine(1.5, 0.0);
    return {[](const GroupElement& g) { return act_on_line(g, 0.0); }, g0};
  }
  if (symbol == "g11") {
    if (group != GroupId::SO3) invalid("'g11' is a symbol on so3");
    RealMatrix r(3, 3);
    r << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    return {[coord](const GroupElement& g) { return coord(g, 0); }, GroupElement::so3(r)};
  }
  Expression e = [&] {
    try {
      return Expression::parse(symbol, coordinate_names(group));
    } catch (const Error& err) {
      invalid(std::string("invalid group symbol: ") + err.what());
    }
  }();
  return {[e](const GroupElement& g) {
            const std::vector<double> v = g.coordinates();
            return e.evaluate(v);
          },
          std::nullopt};
}

RunResult run_groupcheck(const Context& ctx) {
  const Json& c = ctx.config;
  RunResult out;
  out.report = header("groupcheck", ctx.seed);
  const double tol = c.contains("tol") ? c.at("tol").get<double>() : 1e-9;

  if (c.contains("algebra")) {
    const std::string name = c.at("algebra").get<std::string>();
    const LieAlgebraBasis basis = lie_algebra(name, get_int(c, "algebra_dim", 0));
    std::vector<Vector> subspace;
    for (const Json& v : c.at("subspace")) {
      subspace.push_back(point_from_json(v));
      if (subspace.back().size() != basis.dim()) invalid("subspace vectors must have algebra_dim entries");
    }
    if (subspace.empty()) invalid("'subspace' must not be empty");
    const SubalgebraResult r = subalgebra_check(basis, subspace, tol);
    out.report["mode"] = "subalgebra";
    out.report["algebra"] = basis.name;
    out.report["dim"] = basis.dim();
    out.report["tol"] = tol;
    out.report["max_residual"] = r.max_residual;
    out.report["witness"] = r.witness ? Json::array({r.witness->first, r.witness->second}) : Json();
    out.report["pass"] = r.ok;
    set_outcome(out, r.ok);
    return out;
  }

  const std::string name = c.at("group").get<std::string>();
  const GroupId group = *parse_group(name);
  const std::string symbol = c.at("symbol").get<std::string>();
  const BoundaryField bf = boundary_field(group, symbol);
  std::optional<GroupElement> g0 = bf.default_g0;
  if (c.contains("g0")) g0 = element_from_coordinates(group, point_from_json(c.at("g0")));
  if (!g0) invalid("'g0' is required for this group symbol");
  BoundaryVerdictOptions opts;
  opts.samples = get_int(c, "samples", opts.samples);
  opts.tol = tol;
  opts.seed = ctx.seed;
  const BoundaryVerdict v = boundary_subalgebra_verdict(group, bf.field, *g0, opts);

  out.report["mode"] = "boundary";
  out.report["group"] = name;
  out.report["symbol"] = symbol;
  out.report["g0"] = g0->coordinates();
  out.report["normal"] = point_to_json(v.normal);
  Json sub = Json::array();
  for (const Vector& b : v.subalgebra) sub.push_back(point_to_json(b));
  out.report["subalgebra"] = std::move(sub);
  out.report["closure_residual"] = v.closure.max_residual;
  out.report["max_ad_residual"] = v.max_ad_residual;
  out.report["ad_samples"] = v.ad_samples;
  Json wit = Json::array();
  for (const Vector& w : v.witnesses) wit.push_back(point_to_json(w));
  out.report["witnesses"] = std::move(wit);
  out.report["tol"] = tol;
  out.report["pass"] = v.pass;
  set_outcome(out, v.pass);
  return out;
}

Eigen::VectorXcd transfer_symbol(const Json& c, int n, std::uint64_t seed) {
  Eigen::VectorXcd m = Eigen::VectorXcd::Zero(n);
  if (c.contains("m")) {
    const std::vector<double> v = c.at("m").get<std::vector<double>>();
    if (static_cast<int>(v.size()) != n) invalid("'m' must have N entries");
    for (int i = 0; i < n; ++i) m[i] = v[static_cast<std::size_t>(i)];
    return m;
  }
  const std::string name = c.contains("symbol") ? c.at("symbol").get<std::string>() : "half";
  if (name == "half") {
    for (int i = 1; i <= n / 2; ++i) m[i % n] = 1.0;
  } else if (name == "delta0") {
    m[0] = 1.0;
  } else if (name == "ones") {
    m.setOnes();
  } else if (name == "random") {
    Rng rng = make_rng(seed, kTransferStream);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < n; ++i) m[i] = coin(rng) ? 1.0 : 0.0;
  } else {
    invalid("unknown transfer symbol '" + name + "' (half, delta0, ones, random or an explicit 'm')");
  }
  return m;
}

RunResult run_transfer(const Context& ctx) {
  const int n = ctx.config.at("N").get<int>();
  const double p = exponent_from_json(ctx.config.at("p"));
  const int budget = get_int(ctx.config, "budget", 8);
  const Eigen::VectorXcd m = transfer_symbol(ctx.config, n, ctx.seed);
  const TransferenceResult r = fourier_multiplier_norm_finite_cyclic(m, p, budget, ctx.seed, ctx.jobs);
  const bool pass = r.fourier_lb <= r.schur_lb * (1.0 + 1e-9);

  RunResult out;
  out.report = header("transfer", ctx.seed);
  out.report["N"] = n;
  out.report["p"] = exponent_to_json(p);
  Json mj = Json::array();
  for (int i = 0; i < n; ++i) mj.push_back(m[i].real());
  out.report["m"] = std::move(mj);
  out.report["budget"] = budget;
  out.report["fourier_lb"] = r.fourier_lb;
  out.report["schur_lb"] = r.schur_lb;
  out.report["pass"] = pass;
  set_outcome(out, pass);
  return out;
}

}  // namespace

RunResult run_experiment(const Json& config, const RunOptions& options) {
  const std::vector<std::string> problems = validate_json(config, embedded_schema("config"));
  if (!problems.empty()) {
    std::string msg = "config does not match the schema:";
    for (const auto& p : problems) msg += "\n  " + p;
    invalid(msg);
  }
  const Context ctx{config,
                    options.seed.value_or(config.contains("seed") ? config.at("seed").get<std::uint64_t>() : 0),
                    options.jobs.value_or(get_int(config, "jobs", 1))};
  if (ctx.jobs < 1) invalid("jobs must be at least 1");
  const std::string command = config.at("command").get<std::string>();
  try {
    if (command == "classify") return run_classify(ctx);
    if (command == "norms") return run_norms(ctx);
    if (command == "squarefn") return run_squarefn(ctx);
    if (command == "cotlar") return run_cotlar(ctx);
    if (command == "groupcheck") return run_groupcheck(ctx);
    if (command == "transfer") return run_transfer(ctx);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("config: ") + e.what());
  }
  invalid("unknown command '" + command + "'");
}

}  // namespace schurlab
