#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "schurlab/geometry.hpp"
#include "schurlab/multiplier.hpp"
#include "schurlab/symbols.hpp"

namespace schurlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "schur-lab/1";

/// Builds a symbol from {"m_dim", "n_dim", "builtin", "params", "expr", "box"}.
/// Throws ConfigInvalid on inconsistent or missing fields.
SymbolSpec symbol_from_json(const Json& j);

/// A number >= 1 or the string "inf".
double exponent_from_json(const Json& j);
Json exponent_to_json(double p);

Json point_to_json(const Vector& v);
Vector point_from_json(const Json& j);

Json to_json(const BoundaryPoint& pt);
Json to_json(const ClassificationReport& report);
Json to_json(const NormGrowthRecord& record);

/// Shortest round-trip decimal form ("inf" for infinity).
std::string format_number(double v);

inline constexpr const char* kCsvHeader = "symbol_id,p,N,lower_bound,trials,seed,wall_ms";

std::string records_to_csv(const std::vector<NormGrowthRecord>& records);

/// Static SVG line chart of lower bounds against N on a log2 x axis.
std::string norm_growth_svg(const std::vector<NormGrowthRecord>& records, const std::string& title);

/// Writes via a temporary file in the same directory and renames it into
/// place. Throws IOError.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Validates an instance against a JSON schema (the subset used by the
/// published schemas: type, enum, const, properties, required,
/// additionalProperties, items, minItems, maxItems, minimum, maximum, anyOf,
/// oneOf, allOf, if/then/else and local $ref). Returns the list of problems.
std::vector<std::string> validate_json(const Json& instance, const Json& schema);

/// Published schemas compiled into the library: "config" and "report".
const Json& embedded_schema(const std::string& name);

}  // namespace schurlab
