#include "safeaa/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace safeaa::bench {

using conic::ConeBlock;
using conic::ConeKind;
using conic::ConicProblem;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "." + key + ": missing field");
  return *it;
}

Index count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ParseError(where + ": expected a non-negative integer");
  }
  return static_cast<Index>(v.get<long long>());
}

double number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ParseError(where + ": expected a number");
}

Vector vector_field(const json& obj, const char* key, Index expected, const std::string& where) {
  const json& arr = field(obj, key, where);
  const std::string at = where + "." + key;
  if (!arr.is_array()) throw ParseError(at + ": expected an array");
  if (static_cast<Index>(arr.size()) != expected) {
    throw SchemaError(at + ": has " + std::to_string(arr.size()) + " entries, expected " +
                      std::to_string(expected));
  }
  Vector v(expected);
  for (Index i = 0; i < expected; ++i) v(i) = number(arr[i], at + "[" + std::to_string(i) + "]");
  return v;
}

DenseMatrix triplets(const json& obj, const char* key, Index rows, Index cols, bool upper_only,
                     const std::string& where) {
  const json& arr = field(obj, key, where);
  const std::string at = where + "." + key;
  if (!arr.is_array()) throw ParseError(at + ": expected an array of {row, col, value}");
  DenseMatrix m = DenseMatrix::Zero(rows, cols);
  for (std::size_t t = 0; t < arr.size(); ++t) {
    const std::string here = at + "[" + std::to_string(t) + "]";
    const Index r = count(field(arr[t], "row", here), here + ".row");
    const Index c = count(field(arr[t], "col", here), here + ".col");
    const double value = number(field(arr[t], "value", here), here + ".value");
    if (!std::isfinite(value)) throw SchemaError(here + ".value: must be finite");
    if (r >= rows || c >= cols) {
      throw SchemaError(here + ": index (" + std::to_string(r) + ", " + std::to_string(c) +
                        ") out of range for " + std::to_string(rows) + " x " + std::to_string(cols));
    }
    if (upper_only && r > c) throw SchemaError(here + ": P triplets must lie in the upper triangle");
    m(r, c) += value;
  }
  if (upper_only) {
    DenseMatrix strict = m.triangularView<Eigen::StrictlyUpper>();
    m += strict.transpose();
  }
  return m;
}

ConeBlock parse_cone(const json& c, const std::string& where) {
  const json& kind_json = field(c, "kind", where);
  if (!kind_json.is_string()) throw ParseError(where + ".kind: expected a string");
  const auto kind = kind_json.get<std::string>();
  const Index dim = count(field(c, "dim", where), where + ".dim");
  if (kind == "zero") return ConeBlock::zero(dim);
  if (kind == "nonneg") return ConeBlock::nonneg(dim);
  if (kind == "soc") return ConeBlock::second_order(dim);
  if (kind == "psd") {
    const auto side = static_cast<Index>(std::llround((std::sqrt(8.0 * dim + 1.0) - 1.0) / 2.0));
    if (side * (side + 1) / 2 != dim) throw SchemaError(where + ".dim: not a triangular number");
    return ConeBlock::psd_triangle(side);
  }
  if (kind == "box") {
    ConeBlock block = ConeBlock::box(vector_field(c, "l", dim, where), vector_field(c, "u", dim, where));
    for (Index i = 0; i < dim; ++i) {
      if (!(block.lower(i) <= block.upper(i))) {
        throw SchemaError(where + ": box bound " + std::to_string(i) + " has l > u");
      }
    }
    return block;
  }
  throw ParseError(where + ".kind: unknown cone kind '" + kind + "'");
}

json bound_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

json triplet_json(const DenseMatrix& m, bool upper_only) {
  json arr = json::array();
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < (upper_only ? std::min(c + 1, m.rows()) : m.rows()); ++r) {
      if (m(r, c) != 0.0) arr.push_back({{"row", r}, {"col", c}, {"value", m(r, c)}});
    }
  }
  return arr;
}

}  // namespace

ConicProblem parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ParseError("line " + std::to_string(line) + ": " + e.what());
  }

  const std::string root = "problem";
  ConicProblem p;
  const Index n = count(field(doc, "n", root), root + ".n");
  const Index m = count(field(doc, "m", root), root + ".m");
  p.P = triplets(doc, "P", n, n, true, root);
  p.q = vector_field(doc, "q", n, root);
  p.A = triplets(doc, "A", m, n, false, root);
  p.b = vector_field(doc, "b", m, root);
  for (Index i = 0; i < n; ++i)
    if (!std::isfinite(p.q(i))) throw SchemaError(root + ".q: must be finite");
  for (Index i = 0; i < m; ++i)
    if (!std::isfinite(p.b(i))) throw SchemaError(root + ".b: must be finite");

  const json& cones = field(doc, "cones", root);
  if (!cones.is_array()) throw ParseError(root + ".cones: expected an array");
  Index total = 0;
  for (std::size_t i = 0; i < cones.size(); ++i) {
    p.cones.push_back(parse_cone(cones[i], root + ".cones[" + std::to_string(i) + "]"));
    total += p.cones.back().dim;
  }
  if (total != m) {
    throw SchemaError(root + ".cones: dimensions sum to " + std::to_string(total) + " but m = " +
                      std::to_string(m));
  }
  try {
    p.validate();
  } catch (const NumericError& e) {
    throw SchemaError(e.what());
  }
  return p;
}

ConicProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_problem(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::string serialize_problem(const ConicProblem& p) {
  json doc;
  doc["n"] = p.n();
  doc["m"] = p.m();
  doc["P"] = triplet_json(p.P, true);
  doc["q"] = std::vector<double>(p.q.data(), p.q.data() + p.q.size());
  doc["A"] = triplet_json(p.A, false);
  doc["b"] = std::vector<double>(p.b.data(), p.b.data() + p.b.size());
  json cones = json::array();
  for (const auto& block : p.cones) {
    json c = {{"kind", conic::to_string(block.kind)}, {"dim", block.dim}};
    if (block.kind == ConeKind::Box) {
      json l = json::array();
      json u = json::array();
      for (Index i = 0; i < block.dim; ++i) {
        l.push_back(bound_json(block.lower(i)));
        u.push_back(bound_json(block.upper(i)));
      }
      c["l"] = l;
      c["u"] = u;
    }
    cones.push_back(c);
  }
  doc["cones"] = cones;
  return doc.dump(1);
}

void save_problem(const ConicProblem& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << serialize_problem(problem) << '\n';
}

}  // namespace safeaa::bench
