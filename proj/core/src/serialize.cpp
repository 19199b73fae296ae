#include "clarklab/serialize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>

#include "clarklab/errors.hpp"

namespace clarklab {

namespace {

json real_or_null(double x) {
  if (std::isfinite(x)) return x;
  return x < 0 ? json("-inf") : json("inf");
}

json ladder_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(real_or_null(x));
  return out;
}

double angle_of(cplx z) {
  const double a = std::arg(z);
  return a < -1e-9 ? a + 2.0 * kPi : std::max(a, 0.0);
}

}  // namespace

json to_json(const MatMeasure& measure) {
  json atoms = json::array();
  for (const auto& a : measure.atoms)
    atoms.push_back({{"point", complex_to_json(a.point)}, {"angle", angle_of(a.point)}, {"weight", matrix_to_json(a.weight)}});
  json moments = json::array();
  for (const auto& m : measure.moments) moments.push_back(matrix_to_json(m));
  json out{{"dim", measure.dim},
           {"atoms", atoms},
           {"atom_mass", matrix_to_json(measure.atom_mass())},
           {"density_grid", measure.density_grid},
           {"density_points", measure.density.size()},
           {"moment_order", measure.moment_order},
           {"moments", moments}};
  if (!measure.density.empty()) out["density_mass"] = matrix_to_json(measure.density_mass());
  return out;
}

void write_density_csv(std::ostream& os, const MatMeasure& measure) {
  const int n = measure.dim;
  const auto prec = os.precision(17);
  os << "entry";
  for (const auto& s : measure.density) os << ',' << s.angle;
  os << '\n';
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      for (int part = 0; part < 2; ++part) {
        os << "W[" << i << ',' << j << (part ? "].im" : "].re");
        for (const auto& s : measure.density) os << ',' << (part ? s.value(i, j).imag() : s.value(i, j).real());
        os << '\n';
      }
  os.precision(prec);
}

json to_json(const ClarkSystem& system) {
  json nodes = json::array();
  for (const auto& nd : system.nodes)
    nodes.push_back({{"lambda", complex_to_json(nd.lambda)},
                     {"angle", angle_of(nd.lambda)},
                     {"direction", vector_to_json(nd.direction)},
                     {"kernel_norm2", nd.kernel_norm2},
                     {"cluster", nd.cluster}});
  json clusters = json::array();
  Mat total = Mat::Zero(system.U.rows(), system.U.rows());
  for (const auto& cl : system.clusters) {
    clusters.push_back({{"lambda", complex_to_json(cl.lambda)},
                        {"angle", angle_of(cl.lambda)},
                        {"multiplicity", cl.multiplicity},
                        {"weight", matrix_to_json(cl.weight)}});
    total += cl.weight;
  }
  json out{{"theta", to_json(*system.theta)},
           {"unitary", matrix_to_json(system.U)},
           {"dimension", system.dimension},
           {"nodes", nodes},
           {"clusters", clusters},
           {"weight_sum", matrix_to_json(total)},
           {"max_eigen_residual", system.max_eigen_residual},
           {"max_gram_offdiag", system.max_gram_offdiag}};
  bool finite = true;
  for (const auto& nd : system.nodes) finite = finite && std::abs(nd.lambda - 1.0) > 1e-12;
  if (finite) {
    json half = json::array();
    for (const auto& hn : to_halfplane(system).nodes)
      half.push_back({{"t", hn.t}, {"direction", vector_to_json(hn.direction)}, {"kernel_norm2", hn.kernel_norm2}});
    out["halfplane"] = half;
  } else {
    out["halfplane"] = nullptr;
  }
  return out;
}

ClarkSystem clark_system_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("", "system must be a JSON object");
  for (const char* key : {"theta", "unitary", "nodes", "clusters", "dimension"})
    if (!j.contains(key)) throw SpecError(std::string("/") + key, "missing field");
  ClarkSystem sys;
  sys.theta = std::make_shared<const MatFunction>(parse_matfunction(j["theta"]));
  const int n = sys.theta->dim();
  sys.U = parse_matrix(j["unitary"], "/unitary", n);
  sys.dimension = j["dimension"].get<int>();
  for (std::size_t i = 0; i < j["nodes"].size(); ++i) {
    const std::string p = "/nodes/" + std::to_string(i);
    const auto& nd = j["nodes"][i];
    if (!nd.contains("kernel_norm2") || !nd["kernel_norm2"].is_number()) throw SpecError(p + "/kernel_norm2", "expected a number");
    sys.nodes.push_back({parse_complex(nd.at("lambda"), p + "/lambda"), parse_vector(nd.at("direction"), p + "/direction", n),
                         nd["kernel_norm2"].get<double>(), nd.value("cluster", 0)});
  }
  for (std::size_t i = 0; i < j["clusters"].size(); ++i) {
    const std::string p = "/clusters/" + std::to_string(i);
    const auto& cl = j["clusters"][i];
    sys.clusters.push_back({parse_complex(cl.at("lambda"), p + "/lambda"), cl.value("multiplicity", 1),
                            parse_matrix(cl.at("weight"), p + "/weight", n)});
  }
  sys.max_eigen_residual = j.value("max_eigen_residual", 0.0);
  sys.max_gram_offdiag = j.value("max_gram_offdiag", 0.0);
  return sys;
}

void write_atom_plot(std::ostream& os, const std::vector<MeasureAtom>& atoms) {
  const auto prec = os.precision(17);
  for (const auto& a : atoms) os << angle_of(a.point) << ' ' << a.weight.trace().real() << '\n';
  os.precision(prec);
}

void write_atom_plot(std::ostream& os, const ClarkSystem& system) {
  std::vector<MeasureAtom> atoms;
  for (const auto& cl : system.clusters) atoms.push_back({cl.lambda, cl.weight});
  write_atom_plot(os, atoms);
}

json to_json(const FiltrationResult& r) {
  return {{"lhs", matrix_to_json(r.lhs)},   {"rhs", matrix_to_json(r.rhs)},     {"sigma", matrix_to_json(r.sigma)},
          {"abs_err", r.abs_err},           {"max_sigma", r.max_sigma},         {"within_band", r.within_band},
          {"samples", r.samples}};
}

json to_json(const CadResult& r) {
  json out{{"status", to_string(r.status)},
           {"exists", r.status == CadStatus::exists},
           {"c_liminf", real_or_null(r.c_liminf)},
           {"ladder", ladder_json(r.ladder)},
           {"boundary_value", matrix_to_json(r.boundary_value)},
           {"derivative", nullptr},
           {"angular_limit", nullptr}};
  if (r.derivative) out["derivative"] = matrix_to_json(*r.derivative);
  if (r.angular_limit) out["angular_limit"] = matrix_to_json(*r.angular_limit);
  return out;
}

json to_json(const ExtremeResult& r) {
  return {{"classification", to_string(r.classification)},
          {"estimate", real_or_null(r.estimate)},
          {"lower", real_or_null(r.lower)},
          {"upper", real_or_null(r.upper)},
          {"suspects", r.suspects}};
}

json to_json(const DenseResult& r) {
  json dirs = json::array();
  for (std::size_t i = 0; i < r.directions.size(); ++i)
    dirs.push_back({{"direction", vector_to_json(r.directions[i])}, {"cad", to_json(r.per_direction[i])}});
  return {{"densely_defined", to_string(r.value)}, {"directions", dirs}};
}

json to_json(const CoeffSeries& s) {
  json c = json::array();
  for (const auto& m : s.coeffs) c.push_back(matrix_to_json(m));
  return {{"band", s.band}, {"provenance", to_string(s.provenance)}, {"coefficients", c}};
}

void write_matrix_binary(const std::filesystem::path& path, const Mat& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  auto put = [&](double x) {
    auto bits = std::bit_cast<std::uint64_t>(x);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    os.write(buf, 8);
  };
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put(m(i, j).real());
      put(m(i, j).imag());
    }
  if (!os) throw Error("write failed for " + path.string());
}

Mat read_matrix_binary(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  auto get = [&] {
    char buf[8];
    if (!is.read(buf, 8)) throw Error("truncated matrix file " + path.string());
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    return std::bit_cast<double>(bits);
  };
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = get();
      m(i, j) = cplx(re, get());
    }
  return m;
}

json frame_sidecar(const FrameSpace& frame, double unitarity_deviation) {
  return {{"n", frame.dim()},
          {"K", frame.band()},
          {"size", frame.size()},
          {"tau", frame.tau()},
          {"rank", frame.rank()},
          {"eta", unitarity_deviation},
          {"layout", "row-major, little-endian float64 (re, im) pairs"},
          {"index", "(k, i) -> (k + K) n + i"}};
}

}  // namespace clarklab
