#include "schurlab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "schurlab/errors.hpp"

namespace schurlab {

// Defined in the generated schemas.cpp.
extern const char* const kConfigSchemaText;
extern const char* const kReportSchemaText;

namespace {

[[noreturn]] void invalid(const std::string& msg) { fail(ErrorKind::ConfigInvalid, msg); }

int positive_int(const Json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    invalid(std::string("'") + key + "' must be a positive integer");
  }
  return v.get<int>();
}

double number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) invalid(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

Vector vector_param(const Json& j, const char* key) {
  if (!j.contains(key)) invalid(std::string("missing parameter '") + key + "'");
  return point_from_json(j.at(key));
}

SymbolSpec builtin_symbol(const std::string& name, const Json& params) {
  if (name == "ball") return make_ball(positive_int(params, "n", 1), number(params, "R", 1.0));
  if (name == "halfspace") {
    return make_halfspace(vector_param(params, "a"), vector_param(params, "b"), number(params, "c", 0.0));
  }
  if (name == "toeplitz_ball") {
    return make_toeplitz_ball(positive_int(params, "n", 1), number(params, "R", 1.0));
  }
  if (name == "sphere_delta") {
    return make_sphere_delta(positive_int(params, "n", 1), number(params, "delta", 0.0),
                             static_cast<int>(number(params, "x_sign", 1.0)),
                             static_cast<int>(number(params, "y_sign", 1.0)));
  }
  if (name == "triangular") {
    return make_triangular(number(params, "offset", 0.5), number(params, "extent", 1024.0));
  }
  if (name == "degenerate") {
    return make_degenerate(positive_int(params, "m", 1), positive_int(params, "n", 1),
                           number(params, "R", 0.5));
  }
  invalid("unknown builtin '" + name + "'");
}

std::pair<Box, Box> boxes_from_json(const Json& j, int m, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != m + n) {
    invalid("'box' must list m_dim + n_dim intervals");
  }
  Box all;
  for (const Json& iv : j) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
      invalid("each box entry must be [lo, hi]");
    }
    const double lo = iv[0].get<double>();
    const double hi = iv[1].get<double>();
    if (!(lo < hi)) invalid("box intervals need lo < hi");
    all.push_back({lo, hi});
  }
  return {Box(all.begin(), all.begin() + m), Box(all.begin() + m, all.end())};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

bool is_type(const Json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && d == std::floor(d);
  }
  return false;
}

class Validator {
 public:
  explicit Validator(const Json& root) : root_(root) {}

  void check(const Json& v, const Json& s, const std::string& path, std::vector<std::string>& errs,
             int depth = 0) const {
    if (depth > 64) {
      errs.push_back(path + ": schema nesting too deep");
      return;
    }
    if (s.is_boolean()) {
      if (!s.get<bool>()) errs.push_back(path + ": rejected by false schema");
      return;
    }
    if (!s.is_object()) return;
    if (s.contains("$ref")) check(v, resolve(s.at("$ref").get<std::string>()), path, errs, depth + 1);
    if (s.contains("type")) {
      const Json& t = s.at("type");
      bool ok = false;
      if (t.is_string()) {
        ok = is_type(v, t.get<std::string>());
      } else {
        for (const Json& alt : t) ok = ok || is_type(v, alt.get<std::string>());
      }
      if (!ok) {
        errs.push_back(path + ": expected type " + t.dump());
        return;
      }
    }
    if (s.contains("const") && !(v == s.at("const"))) {
      errs.push_back(path + ": expected " + s.at("const").dump());
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const Json& e : s.at("enum")) found = found || v == e;
      if (!found) errs.push_back(path + ": value not in " + s.at("enum").dump());
    }
    if (v.is_number()) {
      const double d = v.get<double>();
      if (s.contains("minimum") && d < s.at("minimum").get<double>()) {
        errs.push_back(path + ": below minimum " + s.at("minimum").dump());
      }
      if (s.contains("maximum") && d > s.at("maximum").get<double>()) {
        errs.push_back(path + ": above maximum " + s.at("maximum").dump());
      }
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const Json& key : s.at("required")) {
          if (!v.contains(key.get<std::string>())) {
            errs.push_back(path + ": missing required field '" + key.get<std::string>() + "'");
          }
        }
      }
      const Json* props = s.contains("properties") ? &s.at("properties") : nullptr;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (props != nullptr && props->contains(it.key())) {
          check(it.value(), props->at(it.key()), path + "/" + it.key(), errs, depth + 1);
        } else if (s.contains("additionalProperties") && s.at("additionalProperties").is_boolean() &&
                   !s.at("additionalProperties").get<bool>()) {
          errs.push_back(path + ": unexpected field '" + it.key() + "'");
        }
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s.at("minItems").get<std::size_t>()) {
        errs.push_back(path + ": too few items");
      }
      if (s.contains("maxItems") && v.size() > s.at("maxItems").get<std::size_t>()) {
        errs.push_back(path + ": too many items");
      }
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          check(v[i], s.at("items"), path + "/" + std::to_string(i), errs, depth + 1);
        }
      }
    }
    if (s.contains("allOf")) {
      for (const Json& sub : s.at("allOf")) check(v, sub, path, errs, depth + 1);
    }
    if (s.contains("anyOf")) {
      bool any = false;
      for (const Json& sub : s.at("anyOf")) any = any || passes(v, sub, path, depth);
      if (!any) errs.push_back(path + ": matches none of anyOf");
    }
    if (s.contains("oneOf")) {
      int count = 0;
      for (const Json& sub : s.at("oneOf")) count += passes(v, sub, path, depth) ? 1 : 0;
      if (count != 1) errs.push_back(path + ": must match exactly one of oneOf");
    }
    if (s.contains("if")) {
      if (passes(v, s.at("if"), path, depth)) {
        if (s.contains("then")) check(v, s.at("then"), path, errs, depth + 1);
      } else if (s.contains("else")) {
        check(v, s.at("else"), path, errs, depth + 1);
      }
    }
  }

 private:
  bool passes(const Json& v, const Json& s, const std::string& path, int depth) const {
    std::vector<std::string> sub;
    check(v, s, path, sub, depth + 1);
    return sub.empty();
  }

  const Json& resolve(const std::string& ref) const {
    if (ref.rfind("#/", 0) != 0) fail(ErrorKind::InvalidArgument, "only local $ref is supported: " + ref);
    const Json* node = &root_;
    std::stringstream ss(ref.substr(2));
    std::string part;
    while (std::getline(ss, part, '/')) {
      if (!node->is_object() || !node->contains(part)) {
        fail(ErrorKind::InvalidArgument, "unresolved $ref " + ref);
      }
      node = &node->at(part);
    }
    return *node;
  }

  const Json& root_;
};

}  // namespace

SymbolSpec symbol_from_json(const Json& j) {
  if (!j.is_object()) invalid("symbol must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "m_dim" && k != "n_dim" && k != "builtin" && k != "params" && k != "expr" && k != "box") {
      invalid("unexpected symbol field '" + k + "'");
    }
  }
  if (!j.contains("m_dim") || !j.contains("n_dim")) invalid("symbol needs m_dim and n_dim");
  const int m = positive_int(j, "m_dim", 1);
  const int n = positive_int(j, "n_dim", 1);
  const bool has_builtin = j.contains("builtin") && !j.at("builtin").is_null();
  const bool has_expr = j.contains("expr") && !j.at("expr").is_null();
  const bool has_box = j.contains("box") && !j.at("box").is_null();
  if (has_builtin == has_expr) invalid("symbol needs exactly one of 'builtin' and 'expr'");
  const Json params = j.contains("params") ? j.at("params") : Json::object();
  if (!params.is_object()) invalid("'params' must be an object");
  try {
    if (has_expr) {
      if (!j.at("expr").is_string()) invalid("'expr' must be a string");
      if (!has_box) invalid("expression symbols need a 'box'");
      auto [bx, by] = boxes_from_json(j.at("box"), m, n);
      return make_expression_symbol(j.at("expr").get<std::string>(), m, n, bx, by);
    }
    if (!j.at("builtin").is_string()) invalid("'builtin' must be a string");
    SymbolSpec spec = builtin_symbol(j.at("builtin").get<std::string>(), params);
    if (spec.m_dim() != m || spec.n_dim() != n) {
      invalid("m_dim/n_dim do not match the builtin parameters");
    }
    if (!has_box) return spec;
    SymbolSpec::Parts parts = spec.parts();
    auto [bx, by] = boxes_from_json(j.at("box"), m, n);
    parts.box_x = bx;
    parts.box_y = by;
    if (!box_contains(bx, parts.anchor_x)) parts.anchor_x = box_center(bx);
    if (!box_contains(by, parts.anchor_y)) parts.anchor_y = box_center(by);
    return SymbolSpec(std::move(parts));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigInvalid) throw;
    invalid(std::string("invalid symbol: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("invalid symbol: ") + e.what());
  }
}

double exponent_from_json(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return kInfinity;
  if (!j.is_number()) invalid("exponent must be a number >= 1 or \"inf\"");
  const double p = j.get<double>();
  if (!(p >= 1.0)) invalid("exponent must be >= 1");
  return p;
}

Json exponent_to_json(double p) {
  if (std::isinf(p)) return "inf";
  return p;
}

Json point_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector point_from_json(const Json& j) {
  if (!j.is_array()) invalid("expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) invalid("expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json to_json(const BoundaryPoint& pt) {
  Json j;
  j["x"] = point_to_json(pt.x);
  j["y"] = point_to_json(pt.y);
  j["n1"] = point_to_json(pt.n1);
  j["n2"] = point_to_json(pt.n2);
  j["residual"] = pt.residual;
  return j;
}

Json to_json(const ClassificationReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  Json w = Json::array();
  for (const Witness& wi : r.witnesses) {
    Json e;
    e["first"] = to_json(wi.first);
    e["second"] = to_json(wi.second);
    e["deviation"] = wi.deviation;
    w.push_back(std::move(e));
  }
  j["witnesses"] = std::move(w);
  j["tolerances"] = {{"angle", r.options.angle_tol},
                     {"transversality", r.options.transversality_tol},
                     {"hessian", r.options.hessian_tol},
                     {"degenerate", r.options.degenerate_tol}};
  j["samples"] = {{"requested", r.samples_requested},
                  {"used", r.samples_used},
                  {"transverse", r.transverse_samples}};
  j["base"] = to_json(r.base);
  j["c2_checked"] = r.c2_checked;
  j["max_angle_deviation"] = r.max_angle_deviation;
  j["max_hessian_violation"] = r.max_hessian_violation;
  j["disagreements"] = r.disagreements;
  j["note"] = r.note;
  return j;
}

Json to_json(const NormGrowthRecord& r) {
  Json j;
  j["symbol_id"] = r.symbol_id;
  j["p"] = exponent_to_json(r.p);
  j["N"] = r.n;
  j["lower_bound"] = r.lower_bound;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["wall_ms"] = std::round(r.wall_ms * 1000.0) / 1000.0;
  return j;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string records_to_csv(const std::vector<NormGrowthRecord>& records) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) {
    out += csv_field(r.symbol_id) + "," + format_number(r.p) + "," + std::to_string(r.n) + "," +
           format_number(r.lower_bound) + "," + std::to_string(r.trials) + "," +
           std::to_string(r.seed) + "," + fixed(r.wall_ms, 3) + "\n";
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IOError, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorKind::IOError, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::IOError, "cannot move output into place at " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IOError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorKind::IOError, "failed reading " + path);
  return ss.str();
}

std::vector<std::string> validate_json(const Json& instance, const Json& schema) {
  std::vector<std::string> errs;
  Validator(schema).check(instance, schema, "", errs);
  return errs;
}

const Json& embedded_schema(const std::string& name) {
  static const Json config = Json::parse(kConfigSchemaText);
  static const Json report = Json::parse(kReportSchemaText);
  if (name == "config") return config;
  if (name == "report") return report;
  fail(ErrorKind::InvalidArgument, "unknown schema '" + name + "'");
}

}  // namespace schurlab
