/**
 * File formats and run manifests.
 *
 * Matrices travel as JSON {"format", "mode": "float"|"rational", "order",
 * "upper": [r_12, r_13, r_23, r_14, ...]} with the upper triangle in
 * column-block order, or as full symmetric square CSV. Rational entries are
 * serialized "p/q". All indices in files and diagnostics are 1-based.
 *
 * Every artifact written by the CLI embeds a manifest (tool version,
 * command, generator id, seeds, input digests, thread count). Outputs are
 * dumped with stable key order and no timestamps, so an identical manifest
 * reproduces byte-identical files.
 */

#ifndef DISTCONE_IO_HPP
#define DISTCONE_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "distcone/admissible.hpp"
#include "distcone/detail/sha256.hpp"
#include "distcone/distance_matrix.hpp"
#include "distcone/matrix_distribution.hpp"
#include "distcone/scalar.hpp"
#include "distcone/version.hpp"

namespace distcone {

using Json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << data;
}

inline Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(where + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Matrices

inline Json matrix_to_json(const DistanceMatrix<double>& r) {
  Json j;
  j["format"] = std::string(kToolName) + "/matrix/" +
                std::to_string(kFormatVersion);
  j["mode"] = "float";
  j["order"] = r.order();
  j["upper"] = r.upper();
  return j;
}

inline Json matrix_to_json(const DistanceMatrix<Rational>& r) {
  Json j;
  j["format"] = std::string(kToolName) + "/matrix/" +
                std::to_string(kFormatVersion);
  j["mode"] = "rational";
  j["order"] = r.order();
  Json upper = Json::array();
  for (const auto& v : r.upper()) upper.push_back(rational_to_string(v));
  j["upper"] = std::move(upper);
  return j;
}

using AnyMatrix =
    std::variant<DistanceMatrix<double>, DistanceMatrix<Rational>>;

inline AnyMatrix matrix_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("matrix: expected a JSON object");
  if (!j.contains("order") || !j.contains("upper"))
    throw ParseError("matrix: missing 'order' or 'upper'");
  const auto order = j.at("order").get<Eigen::Index>();
  const std::string mode = j.value("mode", std::string("float"));
  const auto& upper = j.at("upper");
  if (!upper.is_array()) throw ParseError("matrix: 'upper' must be an array");
  try {
    if (mode == "rational") {
      std::vector<Rational> entries;
      entries.reserve(upper.size());
      for (const auto& v : upper) {
        if (v.is_string())
          entries.push_back(rational_from_string(v.get<std::string>()));
        else if (v.is_number_integer())
          entries.push_back(Rational(v.get<long long>()));
        else
          throw ParseError(
              "matrix: rational entries must be \"p/q\" strings or integers");
      }
      return DistanceMatrix<Rational>::from_upper(order, entries);
    }
    if (mode == "float") {
      std::vector<double> entries;
      entries.reserve(upper.size());
      for (const auto& v : upper) {
        if (!v.is_number())
          throw ParseError("matrix: float entries must be numbers");
        entries.push_back(v.get<double>());
      }
      return DistanceMatrix<double>::from_upper(order, entries);
    }
  } catch (const StructuralError& e) {
    throw ParseError(std::string("matrix: ") + e.what());
  }
  throw ParseError("matrix: unknown mode '" + mode + "'");
}

inline AnyMatrix load_matrix(const std::string& path) {
  return matrix_from_json(parse_json(read_file(path), path));
}

template <typename Scalar>
DistanceMatrix<Scalar> load_matrix_as(const std::string& path) {
  auto any = load_matrix(path);
  if (auto* m = std::get_if<DistanceMatrix<Scalar>>(&any)) return *m;
  throw ParseError(path + ": matrix mode does not match the requested " +
                   std::string(is_exact_v<Scalar> ? "rational" : "float") +
                   " domain (domains never mix inside one operation)");
}

/// Full symmetric square CSV with per-line/per-field diagnostics.
inline DistanceMatrix<double> matrix_from_csv(const std::string& text,
                                              const std::string& where) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    int field = 0;
    while (start <= line.size()) {
      const auto comma = line.find(',', start);
      const std::string tok =
          line.substr(start, comma == std::string::npos ? std::string::npos
                                                        : comma - start);
      ++field;
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        while (used < tok.size() && std::isspace(tok[used])) ++used;
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(where + ":" + std::to_string(line_no) + ": field " +
                         std::to_string(field) + " is not a number: '" + tok +
                         "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(where + ": empty CSV");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
      throw ParseError(where + ":" + std::to_string(i + 1) + ": expected " +
                       std::to_string(n) + " fields, found " +
                       std::to_string(rows[static_cast<std::size_t>(i)].size()));
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  try {
    return DistanceMatrix<double>::from_square(std::move(m));
  } catch (const StructuralError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Validation reports

inline Json validation_report_to_json(const ValidationReport& report) {
  Json j;
  j["valid"] = report.valid;
  j["warnings"] = report.warnings;
  Json viol = Json::array();
  for (const auto& v : report.violations) {
    Json e;
    e["kind"] =
        v.kind == ViolationKind::Triangle ? "triangle" : "negative_entry";
    e["i"] = v.i;
    e["j"] = v.j;
    if (v.kind == ViolationKind::Triangle) e["k"] = v.k;
    e["slack"] = v.slack;
    viol.push_back(std::move(e));
  }
  j["violations"] = std::move(viol);
  return j;
}

// ---------------------------------------------------------------------------
// Metric triples

inline Json triple_to_json(const MetricTriple& T) {
  Json j;
  j["format"] = std::string(kToolName) + "/triple/" +
                std::to_string(kFormatVersion);
  j["points"] = T.points();
  j["metric_upper"] = T.metric().upper();
  std::vector<double> w(T.weights().data(),
                        T.weights().data() + T.weights().size());
  j["weights"] = std::move(w);
  return j;
}

inline MetricTriple triple_from_json(const Json& j) {
  if (!j.contains("points") || !j.contains("metric_upper") ||
      !j.contains("weights"))
    throw ParseError("triple: need 'points', 'metric_upper', 'weights'");
  std::vector<std::string> points;
  for (const auto& p : j.at("points")) {
    if (p.is_string())
      points.push_back(p.get<std::string>());
    else
      points.push_back(p.dump());
  }
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  std::vector<double> upper;
  for (const auto& v : j.at("metric_upper")) {
    if (!v.is_number()) throw ParseError("triple: metric entries must be numbers");
    upper.push_back(v.get<double>());
  }
  VectorXd weights(n);
  const auto& wj = j.at("weights");
  if (static_cast<Eigen::Index>(wj.size()) != n)
    throw ParseError("triple: weight count must match point count");
  for (Eigen::Index i = 0; i < n; ++i) weights(i) = wj[static_cast<std::size_t>(i)].get<double>();
  try {
    auto metric = DistanceMatrix<double>::from_upper(n, upper);
    return MetricTriple::create(std::move(points), std::move(metric),
                                std::move(weights));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("triple: ") + e.what());
  }
}

inline MetricTriple load_triple(const std::string& path) {
  return triple_from_json(parse_json(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Fingerprints

inline Json fingerprint_to_json(const Fingerprint& f) {
  Json j;
  j["format"] = std::string(kToolName) + "/fingerprint/" +
                std::to_string(kFormatVersion);
  j["k"] = f.k;
  j["num_samples"] = f.num_samples;
  std::vector<double> edges(f.grid.edges.data(),
                            f.grid.edges.data() + f.grid.edges.size());
  j["bin_edges"] = std::move(edges);
  Json counts = Json::array();
  for (const auto& [key, c] : f.counts) counts.push_back(Json::array({key, c}));
  j["counts"] = std::move(counts);
  j["overflow"] = f.overflow;
  j["seed"] = f.seed;
  j["generator"] = f.generator;
  return j;
}

inline Fingerprint fingerprint_from_json(const Json& j) {
  Fingerprint f;
  try {
    f.k = j.at("k").get<int>();
    f.num_samples = j.at("num_samples").get<std::int64_t>();
    const auto& edges = j.at("bin_edges");
    f.grid.edges.resize(static_cast<Eigen::Index>(edges.size()));
    for (Eigen::Index i = 0; i < f.grid.edges.size(); ++i)
      f.grid.edges(i) = edges[static_cast<std::size_t>(i)].get<double>();
    for (const auto& entry : j.at("counts")) {
      std::vector<int> key = entry.at(0).get<std::vector<int>>();
      f.counts[std::move(key)] = entry.at(1).get<std::int64_t>();
    }
    f.overflow = j.value("overflow", std::int64_t{0});
    f.seed = j.value("seed", std::uint64_t{0});
    f.generator = j.value("generator", std::string(kGeneratorId));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("fingerprint: ") + e.what());
  }
  if (f.total() != f.num_samples)
    throw ParseError("fingerprint: counts do not add up to num_samples");
  return f;
}

inline Fingerprint load_fingerprint(const std::string& path) {
  return fingerprint_from_json(parse_json(read_file(path), path));
}

// ---------------------------------------------------------------------------
// Polytope dumps

inline Json polytope_to_json(const AdmissiblePolytope<Rational>& P,
                             const MinkowskiDecomposition& mk) {
  Json j;
  j["format"] = std::string(kToolName) + "/polytope/" +
                std::to_string(kFormatVersion);
  j["order"] = P.dimension();
  Json cons = Json::array();
  for (Eigen::Index t = 0; t < P.constraint_count(); ++t) {
    const auto h = P.halfspace(t);
    Json c;
    Json coeffs = Json::array();
    for (Eigen::Index i = 0; i < h.coeffs.size(); ++i)
      coeffs.push_back(rational_to_string(h.coeffs(i)));
    c["coeffs"] = std::move(coeffs);
    c["rhs"] = rational_to_string(h.rhs);
    c["sense"] = h.sense == Sense::LessEq ? "le" : "ge";
    cons.push_back(std::move(c));
  }
  j["constraints"] = std::move(cons);
  Json verts = Json::array();
  for (const auto& v : mk.vertices) {
    Json vv = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
      vv.push_back(rational_to_string(v(i)));
    verts.push_back(std::move(vv));
  }
  j["vertices"] = std::move(verts);
  Json ray = Json::array();
  for (Eigen::Index i = 0; i < mk.ray.size(); ++i)
    ray.push_back(rational_to_string(mk.ray(i)));
  j["ray"] = std::move(ray);
  j["dim_polytope"] = mk.dim_polytope;
  j["dim_hull"] = mk.dim_hull;
  return j;
}

// ---------------------------------------------------------------------------
// Manifests

/// Replay-relevant run description. Execution details that must not change
/// output bytes (thread count, output paths, wall-clock time) do not belong
/// here; the CLI reports those on stderr instead.
struct Manifest {
  std::vector<std::string> command;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::vector<std::pair<std::string, std::string>> input_digests;
};

inline Json manifest_to_json(const Manifest& m) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["format"] = kFormatVersion;
  j["generator"] = kGeneratorId;
  j["command"] = m.command;
  if (m.has_seed) j["seed"] = m.seed;
  Json inputs = Json::object();
  for (const auto& [path, digest] : m.input_digests) inputs[path] = digest;
  j["inputs"] = std::move(inputs);
  j["config_digest"] =
      "sha256:" + detail::sha256_hex(j.dump());
  return j;
}

inline std::string file_digest(const std::string& path) {
  return "sha256:" + detail::sha256_hex(read_file(path));
}

/// Canonical artifact serialization: stable key order, two-space indent,
/// trailing newline. Identical JSON values produce identical bytes.
inline std::string dump_artifact(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace distcone

#endif  // DISTCONE_IO_HPP
