#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "actplace/baselines.hpp"
#include "actplace/instances.hpp"
#include "actplace/placement.hpp"

namespace actplace {

using Json = nlohmann::json;

inline constexpr const char* tool_version = ACTPLACE_VERSION;
inline constexpr const char* gramian_cache_format = "actplace-gramians/1";

/// Non-finite reals are written as JSON null and read back as +infinity.
Json real_to_json(double value);
double real_from_json(const Json& value);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& rows);

/// {"n": int, "A": [[...]], "horizon": {"type": "finite", "t0", "t1"} | {"type": "infinite"}}
Json system_to_json(const LinearSystem& system);
LinearSystem system_from_json(const Json& doc);

/// Resolves an instance descriptor: {"type":"chain","n"}, {"type":"er","n","seed"},
/// {"type":"hitting_set","m","sets"}, or an inline system file (with or
/// without "type":"inline").
LinearSystem system_from_descriptor(const Json& descriptor);

/// FNV-1a over the little-endian bytes of the entries in column-major order.
std::string matrix_checksum(const Matrix& m);

Json gramians_to_json(const NodeGramianSet& gramians, const Json& descriptor = Json::object());
/// Verifies per-node checksums; a mismatch raises invalid_input.
NodeGramianSet gramians_from_json(const Json& doc);

Json to_json(const ActuatorSet& set);
Json to_json(const PlacementResult& result);
PlacementResult placement_result_from_json(const Json& doc, int n);
Json to_json(const OracleResult& result);
OracleResult oracle_result_from_json(const Json& doc, int n);

/// A single solver run with everything needed to replay it.
struct RunRecord {
  Json instance;
  std::string solver;
  Json parameters;
  std::string gramian_method;
  std::optional<PlacementResult> placement;
  std::optional<OracleResult> oracle;
  double wall_time_s = 0.0;
  std::string version = tool_version;
  int n = 0;
};

Json to_json(const RunRecord& record);
RunRecord run_record_from_json(const Json& doc);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// %.17g formatting for CSV output.
std::string format_real(double value);

}  // namespace actplace
