#include "clarklab/spec_io.hpp"

#include <fstream>

#include "clarklab/errors.hpp"

namespace clarklab {

namespace {

std::string child(const std::string& pointer, const std::string& key) { return pointer + "/" + key; }
std::string child(const std::string& pointer, std::size_t i) { return pointer + "/" + std::to_string(i); }

double parse_real(const json& j, const std::string& pointer) {
  if (!j.is_number()) throw SpecError(pointer, "expected a number");
  return j.get<double>();
}

const json& require(const json& obj, const std::string& key, const std::string& pointer) {
  if (!obj.contains(key)) throw SpecError(child(pointer, key), "missing required field");
  return obj.at(key);
}

}  // namespace

cplx parse_complex(const json& j, const std::string& pointer) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2)
    return {parse_real(j[0], child(pointer, 0)), parse_real(j[1], child(pointer, 1))};
  throw SpecError(pointer, "expected a number or a [re, im] pair");
}

Mat parse_matrix(const json& j, const std::string& pointer, int dim) {
  if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number())) {
    if (dim > 1) throw SpecError(pointer, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    Mat m(1, 1);
    m(0, 0) = parse_complex(j, pointer);
    return m;
  }
  if (!j.is_array() || j.empty()) throw SpecError(pointer, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw SpecError(child(pointer, 0), "expected a row array");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto rp = child(pointer, static_cast<std::size_t>(r));
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw SpecError(rp, "row has wrong length");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = parse_complex(row[static_cast<std::size_t>(c)], child(rp, static_cast<std::size_t>(c)));
  }
  if (dim > 0 && (rows != dim || cols != dim))
    throw SpecError(pointer, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  return m;
}

Vec parse_vector(const json& j, const std::string& pointer, int dim) {
  if (!j.is_array()) throw SpecError(pointer, "expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_complex(j[i], child(pointer, i));
  if (dim > 0 && v.size() != dim) throw SpecError(pointer, "vector has wrong length");
  return v;
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

MatFunction parse_matfunction(const json& j) {
  const std::string root;
  if (!j.is_object()) throw SpecError("", "function spec must be a JSON object");
  const json& jd = require(j, "dim", root);
  if (!jd.is_number_integer() || jd.get<int>() < 1) throw SpecError("/dim", "expected a positive integer");
  const int n = jd.get<int>();

  std::vector<BlaschkePotapovFactor> bp;
  if (j.contains("bp")) {
    const json& arr = j.at("bp");
    if (!arr.is_array()) throw SpecError("/bp", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = child("/bp", i);
      const json& f = arr[i];
      if (!f.is_object()) throw SpecError(p, "expected an object");
      const cplx w = parse_complex(require(f, "w", p), child(p, "w"));
      if (std::abs(w) >= 1.0) throw SpecError(child(p, "w"), "zero must lie in the open unit disc");
      Mat proj = f.contains("proj") ? parse_matrix(f.at("proj"), child(p, "proj"), n) : eye(n);
      if (!is_projection(proj)) throw SpecError(child(p, "proj"), "not an orthogonal projection");
      bp.push_back({w, std::move(proj)});
    }
  }

  std::optional<std::vector<Mat>> tail;
  if (j.contains("taylor")) {
    const json& arr = j.at("taylor");
    if (!arr.is_array() || arr.empty()) throw SpecError("/taylor", "expected a non-empty array of matrices");
    tail.emplace();
    for (std::size_t k = 0; k < arr.size(); ++k) tail->push_back(parse_matrix(arr[k], child("/taylor", k), n));
  }

  std::vector<SingularAtom> singular;
  if (j.contains("singular")) {
    const json& arr = j.at("singular");
    if (!arr.is_array()) throw SpecError("/singular", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto p = child("/singular", i);
      const json& f = arr[i];
      if (!f.is_object()) throw SpecError(p, "expected an object");
      const cplx atom = parse_complex(require(f, "atom", p), child(p, "atom"));
      if (std::abs(std::abs(atom) - 1.0) > 1e-12) throw SpecError(child(p, "atom"), "atom must lie on the unit circle");
      const double mass = parse_real(require(f, "mass", p), child(p, "mass"));
      if (!(mass > 0.0)) throw SpecError(child(p, "mass"), "mass must be positive");
      Mat proj;
      if (f.contains("proj")) {
        proj = parse_matrix(f.at("proj"), child(p, "proj"), n);
        if (!is_projection(proj)) throw SpecError(child(p, "proj"), "not an orthogonal projection");
      }
      singular.push_back({atom, mass, std::move(proj)});
    }
  }

  std::optional<Mat> unitary;
  if (j.contains("unitary")) {
    unitary = parse_matrix(j.at("unitary"), "/unitary", n);
    if (!is_unitary(*unitary)) throw SpecError("/unitary", "matrix is not unitary");
  }

  MatFunctionFlags flags;
  if (j.contains("flags")) {
    const json& arr = j.at("flags");
    if (!arr.is_array()) throw SpecError("/flags", "expected an array of strings");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) throw SpecError(child("/flags", i), "expected a string");
      const auto s = arr[i].get<std::string>();
      if (s == "inner") flags.inner = true;
      else if (s == "vanishes_at_zero") flags.vanishes_at_zero = true;
      else throw SpecError(child("/flags", i), "unknown flag '" + s + "'");
    }
  }

  if (bp.empty() && !tail && singular.empty() && !unitary) throw SpecError("", "function has no factors");
  try {
    return MatFunction(n, std::move(bp), std::move(tail), std::move(singular), std::move(unitary), flags);
  } catch (const SpecError&) {
    throw;
  } catch (const PreconditionError& e) {
    throw SpecError("", e.what());
  }
}

json to_json(const MatFunction& theta) {
  json j;
  j["dim"] = theta.dim();
  json bp = json::array();
  for (const auto& f : theta.bp_factors()) bp.push_back({{"w", complex_to_json(f.zero)}, {"proj", matrix_to_json(f.projection)}});
  j["bp"] = std::move(bp);
  if (theta.taylor_tail()) {
    json t = json::array();
    for (const auto& c : *theta.taylor_tail()) t.push_back(matrix_to_json(c));
    j["taylor"] = std::move(t);
  }
  json s = json::array();
  for (const auto& a : theta.singular_factors()) {
    json e = {{"atom", complex_to_json(a.atom)}, {"mass", a.mass}};
    if (a.projection.size() != 0) e["proj"] = matrix_to_json(a.projection);
    s.push_back(std::move(e));
  }
  j["singular"] = std::move(s);
  if (theta.const_unitary()) j["unitary"] = matrix_to_json(*theta.const_unitary());
  json flags = json::array();
  if (theta.is_inner()) flags.push_back("inner");
  if (theta.vanishes_at_zero()) flags.push_back("vanishes_at_zero");
  j["flags"] = std::move(flags);
  return j;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError("", path.string() + ": malformed JSON (" + e.what() + ")");
  }
}

MatFunction load_matfunction(const std::filesystem::path& path) { return parse_matfunction(read_json_file(path)); }

Mat load_matrix(const std::filesystem::path& path, int dim) {
  const json j = read_json_file(path);
  if (j.is_object()) return parse_matrix(require(j, "matrix", ""), "/matrix", dim);
  return parse_matrix(j, "", dim);
}

}  // namespace clarklab
