#include "actplace/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "actplace/errors.hpp"

namespace actplace {

namespace {

[[noreturn]] void bad_input(const std::string& what) { throw Error(ErrorKind::invalid_input, what); }

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) bad_input(std::string("missing field '") + key + "'");
  return doc.at(key);
}

template <class T>
T get_as(const Json& doc, const char* key) {
  try {
    return require(doc, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad_input(std::string("field '") + key + "': " + e.what());
  }
}

Json trace_to_json(const GreedyTrace& trace) {
  Json steps = Json::array();
  for (const auto& s : trace.steps)
    steps.push_back({{"node", s.node + 1}, {"gain", real_to_json(s.gain)}, {"metric_after", real_to_json(s.metric_after)}});
  return {{"steps", steps}, {"evaluations", trace.evaluations}};
}

GreedyTrace trace_from_json(const Json& doc) {
  GreedyTrace trace;
  for (const auto& s : require(doc, "steps"))
    trace.steps.push_back(
        {get_as<int>(s, "node") - 1, real_from_json(require(s, "gain")), real_from_json(require(s, "metric_after"))});
  trace.evaluations = get_as<std::size_t>(doc, "evaluations");
  return trace;
}

}  // namespace

Json real_to_json(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

double real_from_json(const Json& value) {
  if (value.is_null()) return std::numeric_limits<double>::infinity();
  if (!value.is_number()) bad_input("expected a number");
  return value.get<double>();
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& rows) {
  if (!rows.is_array() || rows.empty() || !rows.front().is_array() || rows.front().empty())
    bad_input("matrix must be a non-empty array of non-empty rows");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.front().size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) bad_input("matrix rows have unequal lengths");
    for (Eigen::Index j = 0; j < c; ++j) {
      if (!row[static_cast<std::size_t>(j)].is_number()) bad_input("matrix entries must be numbers");
      m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  }
  return m;
}

Json system_to_json(const LinearSystem& system) {
  Json horizon;
  if (const auto* finite = std::get_if<FiniteHorizon>(&system.horizon()))
    horizon = {{"type", "finite"}, {"t0", finite->t0}, {"t1", finite->t1}};
  else
    horizon = {{"type", "infinite"}};
  return {{"n", system.n()}, {"A", matrix_to_json(system.a())}, {"horizon", horizon}};
}

LinearSystem system_from_json(const Json& doc) {
  const int n = get_as<int>(doc, "n");
  Matrix a = matrix_from_json(require(doc, "A"));
  if (a.rows() != n || a.cols() != n) {
    std::ostringstream msg;
    msg << "system file declares n = " << n << " but A is " << a.rows() << "x" << a.cols();
    throw Error(ErrorKind::dimension, msg.str());
  }
  Horizon horizon = FiniteHorizon{0.0, 1.0};
  if (doc.contains("horizon")) {
    const Json& h = doc.at("horizon");
    const auto type = get_as<std::string>(h, "type");
    if (type == "finite")
      horizon = FiniteHorizon{get_as<double>(h, "t0"), get_as<double>(h, "t1")};
    else if (type == "infinite")
      horizon = InfiniteHorizon{};
    else
      bad_input("unknown horizon type '" + type + "'");
  }
  return LinearSystem(std::move(a), horizon);
}

LinearSystem system_from_descriptor(const Json& descriptor) {
  if (!descriptor.is_object()) bad_input("instance descriptor must be a JSON object");
  const std::string type = descriptor.contains("type") ? get_as<std::string>(descriptor, "type") : "inline";
  if (type == "chain") return chain_network(get_as<int>(descriptor, "n"));
  if (type == "er") return erdos_renyi_system({get_as<int>(descriptor, "n"), get_as<std::uint64_t>(descriptor, "seed")}).system;
  if (type == "hitting_set")
    return hitting_set_system(
               HittingSetInstance(get_as<int>(descriptor, "m"), get_as<std::vector<std::vector<int>>>(descriptor, "sets")))
        .system;
  if (type == "inline") return system_from_json(descriptor);
  bad_input("unknown instance type '" + type + "'");
}

std::string matrix_checksum(const Matrix& m) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const double value = m.data()[k];
    std::uint64_t bits = 0;
    std::memcpy(&bits, &value, sizeof bits);
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (bits >> (8 * byte)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

Json gramians_to_json(const NodeGramianSet& gramians, const Json& descriptor) {
  Json per_node = Json::array();
  Json checksums = Json::array();
  for (const auto& w : gramians.per_node()) {
    per_node.push_back(matrix_to_json(w));
    checksums.push_back(matrix_checksum(w));
  }
  Json doc = system_to_json(gramians.system());
  doc["format"] = gramian_cache_format;
  doc["tool_version"] = tool_version;
  doc["method_tag"] = to_string(gramians.method());
  doc["per_node"] = std::move(per_node);
  doc["checksums"] = std::move(checksums);
  doc["residuals"] = gramians.residuals();
  if (!gramians.residuals().empty()) {
    double worst = 0.0;
    for (const double r : gramians.residuals()) worst = std::max(worst, r);
    doc["max_residual"] = worst;
  }
  doc["instance"] = descriptor;
  return doc;
}

NodeGramianSet gramians_from_json(const Json& doc) {
  if (get_as<std::string>(doc, "format") != gramian_cache_format) bad_input("not an actplace Gramian cache");
  LinearSystem system = system_from_json(doc);
  const GramianMethod method = gramian_method_from_string(get_as<std::string>(doc, "method_tag"));
  const Json& per_node_json = require(doc, "per_node");
  const Json& checksums = require(doc, "checksums");
  if (!per_node_json.is_array() || per_node_json.size() != static_cast<std::size_t>(system.n()) ||
      checksums.size() != per_node_json.size())
    bad_input("Gramian cache must hold one matrix and checksum per node");
  std::vector<Matrix> per_node;
  for (std::size_t i = 0; i < per_node_json.size(); ++i) {
    Matrix w = matrix_from_json(per_node_json[i]);
    if (matrix_checksum(w) != checksums[i].get<std::string>()) {
      std::ostringstream msg;
      msg << "Gramian cache checksum mismatch for node " << i + 1;
      bad_input(msg.str());
    }
    per_node.push_back(std::move(w));
  }
  std::vector<double> residuals;
  if (doc.contains("residuals")) residuals = doc.at("residuals").get<std::vector<double>>();
  return NodeGramianSet(std::move(system), method, std::move(per_node), std::move(residuals));
}

Json to_json(const ActuatorSet& set) { return set.one_based(); }

Json to_json(const PlacementResult& result) {
  Json iterations = Json::array();
  for (const auto& it : result.iterations)
    iterations.push_back({{"stage", it.stage},
                          {"parameter", real_to_json(it.parameter)},
                          {"accuracy", real_to_json(it.accuracy)},
                          {"cardinality", it.cardinality},
                          {"gap", real_to_json(it.gap)},
                          {"metric", real_to_json(it.metric)}});
  return {{"delta", to_json(result.delta)},
          {"cardinality", result.delta.size()},
          {"metric_eps", real_to_json(result.metric_eps)},
          {"metric_exact", real_to_json(result.metric_exact)},
          {"eps_used", real_to_json(result.eps_used)},
          {"E_used", real_to_json(result.E_used)},
          {"bound_F", result.bound_F ? real_to_json(*result.bound_F) : Json(nullptr)},
          {"controllable", result.controllable},
          {"trace", trace_to_json(result.trace)},
          {"iterations", iterations},
          {"diagnostics", result.diagnostics}};
}

PlacementResult placement_result_from_json(const Json& doc, int n) {
  PlacementResult result;
  result.delta = ActuatorSet::from_one_based(n, get_as<std::vector<int>>(doc, "delta"));
  result.metric_eps = real_from_json(require(doc, "metric_eps"));
  result.metric_exact = real_from_json(require(doc, "metric_exact"));
  result.eps_used = real_from_json(require(doc, "eps_used"));
  result.E_used = real_from_json(require(doc, "E_used"));
  if (!require(doc, "bound_F").is_null()) result.bound_F = doc.at("bound_F").get<double>();
  result.controllable = get_as<bool>(doc, "controllable");
  result.trace = trace_from_json(require(doc, "trace"));
  for (const auto& it : require(doc, "iterations"))
    result.iterations.push_back({get_as<std::string>(it, "stage"), real_from_json(require(it, "parameter")),
                                 real_from_json(require(it, "accuracy")), get_as<std::size_t>(it, "cardinality"),
                                 real_from_json(require(it, "gap")), real_from_json(require(it, "metric"))});
  result.diagnostics = get_as<std::vector<std::string>>(doc, "diagnostics");
  return result;
}

Json to_json(const OracleResult& result) {
  return {{"optimal_set", to_json(result.optimal_set)},
          {"optimal_value", real_to_json(result.optimal_value)},
          {"subsets_examined", result.subsets_examined},
          {"feasible", result.feasible}};
}

OracleResult oracle_result_from_json(const Json& doc, int n) {
  OracleResult result;
  result.optimal_set = ActuatorSet::from_one_based(n, get_as<std::vector<int>>(doc, "optimal_set"));
  result.optimal_value = real_from_json(require(doc, "optimal_value"));
  result.subsets_examined = get_as<std::uint64_t>(doc, "subsets_examined");
  result.feasible = get_as<bool>(doc, "feasible");
  return result;
}

Json to_json(const RunRecord& record) {
  Json doc = {{"tool_version", record.version},
              {"instance", record.instance},
              {"n", record.n},
              {"solver", record.solver},
              {"parameters", record.parameters},
              {"gramian_method", record.gramian_method},
              {"wall_time_s", record.wall_time_s}};
  if (record.placement) doc["placement"] = to_json(*record.placement);
  if (record.oracle) doc["oracle"] = to_json(*record.oracle);
  return doc;
}

RunRecord run_record_from_json(const Json& doc) {
  RunRecord record;
  record.version = get_as<std::string>(doc, "tool_version");
  record.instance = require(doc, "instance");
  record.n = get_as<int>(doc, "n");
  record.solver = get_as<std::string>(doc, "solver");
  record.parameters = require(doc, "parameters");
  record.gramian_method = get_as<std::string>(doc, "gramian_method");
  record.wall_time_s = get_as<double>(doc, "wall_time_s");
  if (doc.contains("placement")) record.placement = placement_result_from_json(doc.at("placement"), record.n);
  if (doc.contains("oracle")) record.oracle = oracle_result_from_json(doc.at("oracle"), record.n);
  return record;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad_input("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad_input("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) bad_input("cannot write '" + path + "'");
  out << text;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace actplace
