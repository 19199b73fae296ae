#include "clarklab/cli.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <clarklab/acceptance.hpp>
#include <clarklab/charfun.hpp>
#include <clarklab/errors.hpp>
#include <clarklab/haar.hpp>
#include <clarklab/modelspace.hpp>
#include <clarklab/moments.hpp>
#include <clarklab/opmodel.hpp>
#include <clarklab/serialize.hpp>
#include <clarklab/spec_io.hpp>

namespace clarklab::cli {

namespace {

constexpr const char* kVersion = "0.3.0";

// "re", "re:im"
cplx parse_point(const std::string& text) {
  try {
    const auto colon = text.find(':');
    std::size_t used = 0;
    if (colon == std::string::npos) {
      const double re = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return re;
    }
    const double re = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(text);
    const std::string im_text = text.substr(colon + 1);
    const double im = std::stod(im_text, &used);
    if (used != im_text.size()) throw std::invalid_argument(text);
    return {re, im};
  } catch (const std::logic_error&) {
    throw PreconditionError("cannot parse complex number '" + text + "' (expected re or re:im)");
  }
}

Vec parse_direction(const std::string& text, int n) {
  std::vector<cplx> entries;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) entries.push_back(parse_point(item));
  if (static_cast<int>(entries.size()) != n)
    throw PreconditionError("direction needs " + std::to_string(n) + " entries, got " + std::to_string(entries.size()));
  Vec v = Eigen::Map<Vec>(entries.data(), n);
  if (v.norm() == 0.0) throw PreconditionError("direction must be nonzero");
  return v / v.norm();
}

// Rows of comma separated numbers; lines starting with a letter or '#' are
// headers or comments.
std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw PreconditionError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::logic_error&) {
        throw PreconditionError(path + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<cplx> read_complex_csv(const std::string& path) {
  std::vector<cplx> out;
  int row = 0;
  for (const auto& r : read_csv(path)) {
    ++row;
    if (r.empty() || r.size() > 2) throw PreconditionError(path + ": row " + std::to_string(row) + " must be re[,im]");
    out.emplace_back(r[0], r.size() == 2 ? r[1] : 0.0);
  }
  return out;
}

class Output {
 public:
  Output(std::ostream& fallback, const std::string& path) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw PreconditionError("cannot open " + path + " for writing");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

void emit(std::ostream& fallback, const std::string& path, const json& j) {
  Output o(fallback, path);
  o.stream() << j.dump(2) << '\n';
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path);
  if (!os) throw PreconditionError("cannot open " + path + " for writing");
  body(os);
}

struct Config {
  std::string theta, matrix, unitary, contraction, system, samples, points, out, plot, density_csv, zeta, direction;
  std::string f = "1";
  std::string method = "recurrence";
  std::string only;
  std::vector<std::string> probes;
  int k = 10;
  int band = 0;
  int nodes = 4096;
  int sample_count = 2000;
  int circle_grid = 0;
  int density_grid = 0;
  std::uint64_t seed = 7;
  bool strict = false;
  bool dense = false;
  bool halfplane = false;
  double tol = 0.0;
  double merge_tol = 1e-6, circle_tol = 1e-8, null_tol = 1e-6;
  double cad_bound = 1e6, cad_stable = 1e-3;
  double tau = 1e-8;
};

double scale(const Config& c) { return c.strict ? 0.5 : 1.0; }

int cmd_moments(const Config& c, std::ostream& out) {
  const auto theta = load_matfunction(c.theta);
  const Mat A = load_matrix(c.matrix, theta.dim());
  if (!is_contraction(A)) throw PreconditionError("A must be a contraction");
  json j{{"command", "moments"}, {"k", c.k}, {"dim", theta.dim()}};
  const double tol = (c.tol > 0 ? c.tol : 1e-8) * scale(c);
  std::vector<Mat> l;
  if (theta.vanishes_at_zero()) {
    if (c.method == "elliott") l = elliott_moments(theta, A, c.k, {c.nodes, 1.0});
    else l = recurrence_moments(theta, A, c.k);
    if (c.method == "both") {
      const auto e = elliott_moments(theta, A, c.k, {c.nodes, 1.0});
      double gap = 0.0;
      for (int k = 0; k <= c.k; ++k) gap = std::max(gap, max_abs(e[k] - l[k]));
      j["elliott_gap"] = gap;
      j["tolerance"] = tol;
      if (gap > tol) {
        emit(out, c.out, j);
        throw NumericalError("quadrature and recurrence moments differ by " + std::to_string(gap));
      }
    }
  } else {
    if (c.method != "recurrence") throw PreconditionError("quadrature moments need Theta(0) = 0");
    const MomentTable t(theta, A, c.k);
    l = t.backward();
  }
  json lj = json::array();
  for (const auto& m : l) lj.push_back(matrix_to_json(m));
  j["l"] = lj;

  MatMeasure measure;
  measure.dim = theta.dim();
  measure.set_moments(MomentTable(theta, A, c.k), c.k);
  if (c.density_grid > 0) {
    if (!is_unitary(A)) throw PreconditionError("density of Omega needs a unitary A");
    const auto d = ac_density(theta, A, c.density_grid);
    measure.density = d.samples;
    measure.density_grid = d.grid_size;
    j["density_skipped"] = d.skipped;
    j["density_warning"] = d.warning;
    if (!c.density_csv.empty()) write_file(c.density_csv, [&](std::ostream& os) { write_density_csv(os, measure); });
  }
  j["measure"] = to_json(measure);
  emit(out, c.out, j);
  return ok;
}

int cmd_disintegrate(const Config& c, std::ostream& out) {
  const auto theta = load_matfunction(c.theta);
  const auto f = TrigPolynomial::parse(c.f);
  json j{{"command", "disintegrate"}, {"f", c.f}, {"seed", c.seed}};
  j.update(to_json(filtration_check(theta, f, c.sample_count, c.seed)));
  if (c.circle_grid > 0) {
    if (theta.dim() != 1) throw PreconditionError("the circle grid version is for n = 1");
    j["circle"] = to_json(filtration_check_circle(theta, f, c.circle_grid));
  }
  emit(out, c.out, j);
  return ok;
}

int cmd_spectrum(const Config& c, std::ostream& out) {
  auto theta = std::make_shared<const MatFunction>(load_matfunction(c.theta));
  const Mat U = c.unitary.empty() ? eye(theta->dim()) : load_matrix(c.unitary, theta->dim());
  const double s = scale(c);
  const auto sys = clark_eigensystem(theta, U, {c.merge_tol * s, c.circle_tol * s, c.null_tol * s});
  json j{{"command", "spectrum"}};
  j.update(to_json(sys));
  emit(out, c.out, j);
  if (!c.plot.empty()) write_file(c.plot, [&](std::ostream& os) { write_atom_plot(os, sys); });
  return ok;
}

int cmd_reconstruct(const Config& c, std::ostream& out) {
  const auto sys = clark_system_from_json(read_json_file(c.system));
  const auto samples = read_complex_csv(c.samples);
  const auto points = read_complex_csv(c.points);
  std::optional<HalfPlaneSystem> half;
  if (c.halfplane) half = to_halfplane(sys);
  Output o(out, c.out);
  auto& os = o.stream();
  const auto prec = os.precision(17);
  const int n = sys.theta->dim();
  os << "z_re,z_im";
  for (int i = 0; i < n; ++i) os << ",f" << i << "_re,f" << i << "_im";
  os << '\n';
  for (cplx z : points) {
    const Vec v = half ? reconstruct(*half, samples, z) : reconstruct(sys, samples, z);
    os << z.real() << ',' << z.imag();
    for (int i = 0; i < n; ++i) os << ',' << v(i).real() << ',' << v(i).imag();
    os << '\n';
  }
  os.precision(prec);
  return ok;
}

int cmd_charfun(const Config& c, std::ostream& out) {
  const auto theta = load_matfunction(c.theta);
  const int band = c.band > 0 ? c.band : 2 * c.k;
  FrameOptions fo;
  fo.tau_relative = c.tau * scale(c);
  const auto frame = build_frame(theta, band, fo);
  const double tol = (c.tol > 0 ? c.tol : 1e-6) * scale(c);
  const auto cs = taylor_coeffs(frame.taylor_series(), c.k);
  const auto d = nagy_foias_coeffs(frame, c.k);
  json cj = json::array(), dj = json::array();
  for (int k = 1; k <= c.k; ++k) {
    cj.push_back(matrix_to_json(cs[k]));
    dj.push_back(matrix_to_json(d[k]));
  }
  double residual = max_difference(d, cs);
  json j{{"command", "charfun"}, {"k", c.k}, {"band", band}, {"c", cj}, {"d", dj}, {"nagy_foias_residual", residual}};
  if (!c.contraction.empty()) {
    const Mat A = load_matrix(c.contraction, theta.dim());
    const auto g = gamma_coeffs(frame, A, c.k);
    const auto gs = gamma_series_coeffs(frame.taylor_series(), A, c.k);
    json gj = json::array(), sj = json::array();
    for (int k = 1; k <= c.k; ++k) {
      gj.push_back(matrix_to_json(g[k]));
      sj.push_back(matrix_to_json(gs[k]));
    }
    const double gr = max_difference(g, gs);
    j["gamma"] = {{"frame", gj}, {"series", sj}, {"residual", gr},
                  {"recurrence_residual", gamma_recurrence_residual(frame.taylor_series(), A, c.k)}};
    residual = std::max(residual, gr);
  }
  if (!c.probes.empty()) {
    const Mat U = c.unitary.empty() ? eye(theta.dim()) : load_matrix(c.unitary, theta.dim());
    json lj = json::array();
    double lr = 0.0;
    for (const auto& p : c.probes) {
      const cplx z = parse_point(p);
      const Mat v = lifschitz_charfun(frame, U, z);
      const double e = max_abs(v - theta.eval(z));
      lr = std::max(lr, e);
      lj.push_back({{"z", complex_to_json(z)}, {"value", matrix_to_json(v)}, {"error", e}});
    }
    j["lifschitz"] = {{"points", lj}, {"residual", lr}};
  }
  j["max_residual"] = residual;
  j["tolerance"] = tol;
  emit(out, c.out, j);
  if (residual > tol) throw NumericalError("characteristic function residual " + std::to_string(residual) + " above tolerance");
  return ok;
}

CadOptions cad_options(const Config& c) {
  CadOptions o;
  o.bound = c.cad_bound;
  o.stable_relative = c.cad_stable * scale(c);
  return o;
}

int cmd_cad(const Config& c, std::ostream& out) {
  const auto theta = load_matfunction(c.theta);
  const auto opts = cad_options(c);
  json j{{"command", "cad"}};
  bool inconclusive = false;
  if (c.dense) {
    const auto r = densely_defined_test(theta, opts);
    j.update(to_json(r));
    inconclusive = r.value == Tristate::indeterminate;
  } else {
    const cplx zeta = c.zeta.empty() ? cplx(1.0) : parse_point(c.zeta);
    std::optional<Vec> dir;
    if (!c.direction.empty()) dir = parse_direction(c.direction, theta.dim());
    const auto r = cad_test(theta, zeta, dir, opts);
    j["zeta"] = complex_to_json(zeta);
    j.update(to_json(r));
    inconclusive = r.status == CadStatus::indeterminate;
  }
  emit(out, c.out, j);
  return inconclusive ? Exit::inconclusive : ok;
}

int cmd_extreme(const Config& c, std::ostream& out) {
  const auto theta = load_matfunction(c.theta);
  const auto r = extreme_test(theta);
  json j{{"command", "extreme"}};
  j.update(to_json(r));
  emit(out, c.out, j);
  return r.classification == Extremality::indeterminate ? Exit::inconclusive : ok;
}

int cmd_frame_export(const Config& c, std::ostream& out) {
  const auto theta = load_matfunction(c.theta);
  FrameOptions fo;
  fo.tau_relative = c.tau * scale(c);
  const auto frame = build_frame(theta, c.k, fo);
  const Mat U = c.unitary.empty() ? eye(theta.dim()) : load_matrix(c.unitary, theta.dim());
  const auto op = clark_operator(frame, U);
  const std::string prefix = c.out.empty() ? "frame" : c.out;
  write_matrix_binary(prefix + ".gram.bin", frame.gram());
  write_matrix_binary(prefix + ".shift.bin", frame.shift_gram());
  write_matrix_binary(prefix + ".compressed.bin", op.compressed);
  json side = frame_sidecar(frame, unitarity_defect(op.compressed));
  side["files"] = {{"gram", prefix + ".gram.bin"}, {"shift_gram", prefix + ".shift.bin"},
                   {"compressed", prefix + ".compressed.bin"}};
  side["compressed_size"] = op.compressed.rows();
  write_file(prefix + ".json", [&](std::ostream& os) { os << side.dump(2) << '\n'; });
  out << prefix << ".json\n";
  return ok;
}

int cmd_selftest(const Config& c, std::ostream& out) {
  AcceptanceOptions opts;
  opts.tolerance_scale = scale(c);
  if (!c.only.empty()) {
    std::stringstream ss(c.only);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        opts.only.push_back(std::stoi(item));
      } catch (const std::logic_error&) {
        throw PreconditionError("--only expects comma separated criterion numbers");
      }
    }
  }
  bool all = true;
  run_acceptance(opts, [&](const CriterionResult& r) {
    out << format(r) << std::endl;
    all = all && r.pass;
  });
  return all ? ok : Exit::internal;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clark measures, model spaces and characteristic functions of matrix inner functions", "clarklab"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Config c;
  app.add_flag("--strict", c.strict, "Halve every tolerance");

  auto tol_flags = [&](CLI::App* s) {
    s->add_option("--tol", c.tol, "Agreement tolerance");
  };

  auto* moments = app.add_subcommand("moments", "Moments l_k(A) of the Clark measure Omega_{Theta A*}");
  moments->add_option("--theta", c.theta, "Function spec (JSON)")->required()->check(CLI::ExistingFile);
  moments->add_option("--A", c.matrix, "Contraction A (JSON)")->required()->check(CLI::ExistingFile);
  moments->add_option("--k", c.k, "Highest moment index")->check(CLI::NonNegativeNumber);
  moments->add_option("--method", c.method, "recurrence | elliott | both")
      ->check(CLI::IsMember({"recurrence", "elliott", "both"}));
  moments->add_option("--nodes", c.nodes, "Quadrature nodes")->check(CLI::PositiveNumber);
  moments->add_option("--density-grid", c.density_grid, "Midpoint grid for the a.c. density")->check(CLI::NonNegativeNumber);
  moments->add_option("--density-csv", c.density_csv, "Write the density as CSV");
  moments->add_option("--out", c.out, "Output file (default stdout)");
  tol_flags(moments);

  auto* dis = app.add_subcommand("disintegrate", "Check the Haar disintegration of Clark measures");
  dis->add_option("--theta", c.theta, "Function spec (JSON)")->required()->check(CLI::ExistingFile);
  dis->add_option("--f", c.f, "Trigonometric polynomial f_{-d},...,f_d (entries re or re:im)");
  dis->add_option("--samples", c.sample_count, "Haar samples")->check(CLI::PositiveNumber);
  dis->add_option("--seed", c.seed, "RNG seed");
  dis->add_option("--circle-grid", c.circle_grid, "Also run the deterministic circle version (n = 1)");
  dis->add_option("--out", c.out, "Output file (default stdout)");

  auto* spec = app.add_subcommand("spectrum", "Clark eigen-system of a rational inner function");
  spec->add_option("--theta", c.theta, "Function spec (JSON)")->required()->check(CLI::ExistingFile);
  spec->add_option("--unitary", c.unitary, "Unitary U (JSON, default identity)")->check(CLI::ExistingFile);
  spec->add_option("--plot", c.plot, "Write angle/weight plot data");
  spec->add_option("--merge-tol", c.merge_tol, "Root cluster merge tolerance");
  spec->add_option("--circle-tol", c.circle_tol, "Allowed distance of roots from the circle");
  spec->add_option("--null-tol", c.null_tol, "Null-space threshold for eigenvectors");
  spec->add_option("--out", c.out, "Output file (default stdout)");

  auto* rec = app.add_subcommand("reconstruct", "Reconstruct a model-space element from Clark samples");
  rec->add_option("--system", c.system, "ClarkSystem JSON from `spectrum`")->required()->check(CLI::ExistingFile);
  rec->add_option("--samples", c.samples, "CSV of samples re,im, one per node")->required()->check(CLI::ExistingFile);
  rec->add_option("--points", c.points, "CSV of points re,im")->required()->check(CLI::ExistingFile);
  rec->add_flag("--halfplane", c.halfplane, "Points and samples live on the upper half-plane side");
  rec->add_option("--out", c.out, "Output CSV (default stdout)");

  auto* cf = app.add_subcommand("charfun", "Nagy-Foias / Gamma / Lifschitz characteristic function checks");
  cf->add_option("--theta", c.theta, "Function spec (JSON)")->required()->check(CLI::ExistingFile);
  cf->add_option("--k", c.k, "Number of coefficients")->check(CLI::PositiveNumber);
  cf->add_option("--band", c.band, "Frame band (default 2k)");
  cf->add_option("--contraction", c.contraction, "Contraction A for Gamma (JSON)")->check(CLI::ExistingFile);
  cf->add_option("--unitary", c.unitary, "U_ref for the Lifschitz function (JSON)")->check(CLI::ExistingFile);
  cf->add_option("--z", c.probes, "Probe points for the Lifschitz function (re:im)");
  cf->add_option("--tau", c.tau, "Relative Gram eigenvalue cutoff");
  cf->add_option("--out", c.out, "Output file (default stdout)");
  tol_flags(cf);

  auto* cad = app.add_subcommand("cad", "Caratheodory angular derivative test");
  cad->add_option("--theta", c.theta, "Function spec (JSON)")->required()->check(CLI::ExistingFile);
  cad->add_option("--zeta", c.zeta, "Boundary point re:im (default 1)");
  cad->add_option("--direction", c.direction, "Direction x as comma separated re:im entries");
  cad->add_flag("--dense", c.dense, "Run the dense-definedness test at 1 instead");
  cad->add_option("--bound", c.cad_bound, "Ladder bound treated as divergence");
  cad->add_option("--stable", c.cad_stable, "Relative change treated as converged");
  cad->add_option("--out", c.out, "Output file (default stdout)");

  auto* ext = app.add_subcommand("extreme", "Extreme-point test for the unit ball of H^infinity");
  ext->add_option("--theta", c.theta, "Function spec (JSON)")->required()->check(CLI::ExistingFile);
  ext->add_option("--out", c.out, "Output file (default stdout)");

  auto* fe = app.add_subcommand("frame-export", "Export Gram, shift Gram and compressed Z(U) as binary");
  fe->add_option("--theta", c.theta, "Function spec (JSON)")->required()->check(CLI::ExistingFile);
  fe->add_option("--k", c.k, "Frame band")->check(CLI::PositiveNumber);
  fe->add_option("--unitary", c.unitary, "Unitary U (JSON, default identity)")->check(CLI::ExistingFile);
  fe->add_option("--tau", c.tau, "Relative Gram eigenvalue cutoff");
  fe->add_option("--out", c.out, "Output prefix (default ./frame)");

  auto* st = app.add_subcommand("selftest", "Run the acceptance criteria");
  st->add_option("--only", c.only, "Comma separated criterion numbers");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return precondition;
  }

  try {
    if (moments->parsed()) return cmd_moments(c, out);
    if (dis->parsed()) return cmd_disintegrate(c, out);
    if (spec->parsed()) return cmd_spectrum(c, out);
    if (rec->parsed()) return cmd_reconstruct(c, out);
    if (cf->parsed()) return cmd_charfun(c, out);
    if (cad->parsed()) return cmd_cad(c, out);
    if (ext->parsed()) return cmd_extreme(c, out);
    if (fe->parsed()) return cmd_frame_export(c, out);
    if (st->parsed()) return cmd_selftest(c, out);
  } catch (const SpecError& e) {
    err << "error: invalid spec: " << e.what() << '\n';
    return precondition;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return precondition;
  } catch (const NumericalError& e) {
    err << "inconclusive: " << e.what() << '\n';
    return inconclusive;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return internal;
  }
  return internal;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace clarklab::cli
