#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "io.hpp"
#include "kwm/diagnostics.hpp"
#include "kwm/errors.hpp"
#include "kwm/kernels.hpp"
#include "kwm/periodogram.hpp"
#include "kwm/simulate.hpp"
#include "kwm/spectra.hpp"
#include "kwm/symplectic.hpp"

namespace kwm::cli {
namespace {

using io::json;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

struct Options {
  double tol = kDefaultTolerance;
  std::uint64_t seed = 0;
  std::string input = "-";
  std::string kernel;
  std::string noise;
  std::string output;
  std::string window;
  std::string lags;
  std::string form = "fourier";
  std::string quadrature = "q";
  std::size_t samples = 100000;
  std::size_t length = 1024;
  std::size_t segments = 16;
};

std::string read_text(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::ifstream file(path);
  if (!file) throw DomainError("cannot open " + path);
  std::ostringstream ss;
  ss << file.rdbuf();
  return ss.str();
}

json read_json(const std::string& path, std::istream& in) {
  try {
    return io::unwrap_report(json::parse(read_text(path, in)));
  } catch (const json::parse_error& e) {
    throw DomainError((path == "-" ? std::string("stdin") : path) + ": " + e.what());
  }
}

void emit(std::ostream& out, const std::string& verdict, json margins, json data) {
  const json doc = {{"verdict", verdict}, {"margins", std::move(margins)}, {"data", std::move(data)}};
  out << doc.dump(2) << '\n';
}

json margins_of(const ValidationReport& r) {
  return {{"min_eigenvalue", r.min_eigenvalue}, {"margin", r.margin}, {"threshold", r.threshold}};
}

// `a..b` (inclusive) or a comma-separated list; a single integer is a one-site list.
std::vector<Lag> parse_sites(const std::string& text, const Group& g) {
  if (text.empty()) throw DomainError("empty window");
  std::vector<Lag> sites;
  auto to_int = [&](const std::string& s) -> std::int64_t {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw DomainError("bad window \"" + text + "\"");
  };
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto first = to_int(text.substr(0, dots));
    const auto last = to_int(text.substr(dots + 2));
    if (last < first) throw DomainError("window " + text + " is empty");
    sites = window_range(first, last);
  } else {
    std::stringstream ss(text);
    for (std::string cell; std::getline(ss, cell, ',');) sites.push_back(to_int(cell));
  }
  if (g.is_finite()) {
    for (auto& a : sites) a = g.reduce(a);
  }
  return sites;
}

// Lag lists for transforms tolerate repeats after reduction on finite groups.
std::vector<Lag> parse_lags(const std::string& text, const Group& g) {
  auto lags = parse_sites(text, g);
  std::sort(lags.begin(), lags.end());
  lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
  return lags;
}

json vector_to_json(const std::vector<Lag>& v) { return json(v); }

int invalid(const Streams& s, const std::string& what, const ValidationReport& r, json data = {}) {
  json payload = io::report_to_json(r);
  for (auto& [key, value] : data.items()) payload[key] = value;
  emit(s.out, "invalid", margins_of(r), std::move(payload));
  s.err << what << ": invalid, min eigenvalue " << r.min_eigenvalue << '\n';
  return 1;
}

int validate_kernel_cmd(const Options& o, const Streams& s) {
  const auto k = io::kernel_from_json(read_json(o.input, s.in));
  const auto sites = parse_sites(o.window, k.group());
  const auto r = validate_quantum_kernel(k, sites, o.tol);
  if (!r.valid()) return invalid(s, "validate-kernel", r, {{"window", vector_to_json(sites)}});
  json data = io::report_to_json(r);
  data["window"] = vector_to_json(sites);
  emit(s.out, "valid", margins_of(r), std::move(data));
  s.err << "validate-kernel: valid on " << sites.size() << " sites, min eigenvalue " << r.min_eigenvalue
        << '\n';
  return 0;
}

int validate_spectrum_cmd(const Options& o, const Streams& s) {
  const auto phi = io::spectrum_from_json(read_json(o.input, s.in));
  const auto r = validate_spectrum(phi, o.tol);
  if (!r.valid()) return invalid(s, "validate-spectrum", r);
  emit(s.out, "valid", margins_of(r), io::report_to_json(r));
  s.err << "validate-spectrum: valid, min eigenvalue " << r.min_eigenvalue << '\n';
  return 0;
}

int to_spectrum_cmd(const Options& o, const Streams& s) {
  const auto k = io::kernel_from_json(read_json(o.input, s.in));
  auto phi = autocov_to_spectrum(k);
  if (o.form == "grid" && phi.form() == DensityForm::Fourier) {
    std::vector<ComplexMatrix> values;
    for (std::size_t j = 0; j < phi.group().dual_size(); ++j) values.push_back(phi.density_at(j));
    phi = SpectralMeasure::grid(phi.group(), phi.dim(), std::move(values));
  }
  emit(s.out, "ok", json::object(), io::spectrum_to_json(phi));
  s.err << "to-spectrum: " << k.table().size() << " lags -> " << to_string(phi.form()) << " density\n";
  return 0;
}

int to_kernel_cmd(const Options& o, const Streams& s) {
  const auto phi = io::spectrum_from_json(read_json(o.input, s.in));
  const Group& g = phi.group();
  std::vector<Lag> lags;
  if (!o.lags.empty()) {
    lags = parse_lags(o.lags, g);
  } else if (g.is_finite()) {
    lags = g.elements();
  } else {
    lags = window_range(-g.nyquist_lag(), g.nyquist_lag());
  }
  const auto k = spectrum_to_autocov(phi, lags);
  emit(s.out, "ok", json::object(), io::kernel_to_json(k));
  s.err << "to-kernel: " << lags.size() << " lags\n";
  return 0;
}

// {"group", "field": matrix or [matrix per dual sample], "atoms"?, "masses"?}
int design_cmd(const Options& o, const Streams& s) {
  const json j = read_json(o.input, s.in);
  if (!j.contains("group") || !j.contains("field")) throw DomainError("design: needs \"group\" and \"field\"");
  const Group g = io::group_from_json(j.at("group"));
  const json& fj = j.at("field");
  std::vector<RealMatrix> field;
  const bool constant = fj.is_array() && !fj.empty() && fj[0].is_array() && !fj[0].empty() &&
                        fj[0][0].is_number();
  if (constant) {
    field.assign(g.dual_size(), io::real_matrix_from_json(fj, "design.field"));
  } else {
    if (!fj.is_array()) throw DomainError("design.field: expected a matrix or an array of matrices");
    for (std::size_t i = 0; i < fj.size(); ++i) {
      field.push_back(io::real_matrix_from_json(fj[i], "design.field[" + std::to_string(i) + "]"));
    }
  }
  if (field.empty() || field.front().rows() % 2 != 0) throw DomainError("design.field: need 2k x 2k matrices");
  const auto modes = static_cast<std::size_t>(field.front().rows() / 2);

  std::vector<std::size_t> bad;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto r = check_uncertainty(QuantumCovarianceMatrix(field[i], modes), o.tol);
    worst = std::min(worst, r.min_eigenvalue);
    if (!r.valid()) bad.push_back(i);
  }
  if (!bad.empty()) {
    emit(s.out, "invalid", {{"min_eigenvalue", worst}},
         {{"invalid_points", bad}, {"detail", "field violates M + (i/2)J >= 0"}});
    s.err << "design: field invalid at " << bad.size() << " dual points\n";
    return 1;
  }

  SingularPart singular;
  if (j.contains("atoms")) {
    for (const auto& a : j.at("atoms")) {
      singular.atoms.push_back({a.at("theta").get<double>(),
                                io::complex_matrix_from_json(a.at("weight"), "design.atoms.weight")});
    }
  }
  if (j.contains("masses")) {
    for (const auto& m : j.at("masses")) {
      singular.masses.push_back(io::complex_matrix_from_json(m, "design.masses"));
    }
  }
  const auto phi = design_spectrum(g, modes, field, singular, o.tol);
  const auto r = validate_spectrum(phi, o.tol);
  emit(s.out, "valid", margins_of(r), io::spectrum_to_json(phi));
  s.err << "design: valid spectrum on " << g.dual_size() << " dual points\n";
  return 0;
}

int photon_numbers_cmd(const Options& o, const Streams& s) {
  const auto phi = io::spectrum_from_json(read_json(o.input, s.in));
  const auto r = validate_spectrum(phi, o.tol);
  if (!r.valid()) return invalid(s, "photon-numbers", r);
  const auto n = photon_numbers(phi);
  emit(s.out, "valid", margins_of(r), {{"per_mode", n.per_mode}, {"total", n.total}});
  s.err << "photon-numbers: total " << n.total << '\n';
  return 0;
}

int diagnose_cmd(const Options& o, const Streams& s) {
  const auto phi = io::spectrum_from_json(read_json(o.input, s.in));
  const auto r = validate_spectrum(phi, o.tol);
  const auto d = decompose_and_diagnose(phi, o.tol);
  const auto m = mixing_diagnostics(phi);
  json decomposition = {{"ac_mass", io::complex_matrix_to_json(d.ac_mass)},
                        {"atomic_mass", io::complex_matrix_to_json(d.atomic_mass)},
                        {"purity_ok", d.purity_ok},
                        {"min_purity_determinant", d.min_purity_determinant},
                        {"purity_bound", d.purity_bound},
                        {"purity_failures", d.purity_failures},
                        {"log_det_integral", d.log_det_finite ? json(d.log_det_integral) : json(nullptr)},
                        {"log_det_finite", d.log_det_finite},
                        {"gap_points", d.gap_points},
                        {"singular_density_points", d.singular_density_points}};
  json mixing = {{"finite_group", m.finite_group}, {"has_atoms", m.has_atoms},
                 {"tail_norm", m.tail_norm},       {"tail_from", m.tail_from},
                 {"tail_to", m.tail_to},           {"decays", m.decays},
                 {"note", m.note}};
  json data = {{"validation", io::report_to_json(r)},
               {"decomposition", std::move(decomposition)},
               {"mixing", std::move(mixing)}};
  json margins = margins_of(r);
  margins["purity_slack"] = d.min_purity_determinant - d.purity_bound;
  emit(s.out, to_string(r.verdict), std::move(margins), std::move(data));
  s.err << "diagnose: " << to_string(r.verdict) << ", " << d.gap_points.size() << " gap points, purity "
        << (d.purity_ok ? "ok" : "violated") << '\n';
  return r.valid() ? 0 : 1;
}

json lag_table_to_json(const std::map<Lag, RealMatrix>& table) {
  json out = json::array();
  for (const auto& [a, m] : table) out.push_back({{"a", a}, {"matrix", io::real_matrix_to_json(m)}});
  return out;
}

int simulate_displacement_cmd(const Options& o, const Streams& s) {
  if (o.kernel == "-" && o.noise == "-") throw DomainError("only one of --kernel, --noise can read stdin");
  const auto k = io::kernel_from_json(read_json(o.kernel, s.in));
  const ClassicalCovarianceKernel c(io::kernel_from_json(read_json(o.noise, s.in)));
  const auto sites = parse_sites(o.window, k.group());
  const auto kr = validate_quantum_kernel(k, sites, o.tol);
  if (!kr.valid()) return invalid(s, "simulate-displacement", kr, {{"window", vector_to_json(sites)}});
  const auto mc = monte_carlo_displacement(k, c, sites, o.samples, o.seed, o.tol);
  json data = {{"window", vector_to_json(sites)},
               {"samples", mc.samples},
               {"batches", mc.batches},
               {"seed", o.seed},
               {"empirical", io::kernel_to_json(mc.empirical)},
               {"exact", io::kernel_to_json(mc.exact)},
               {"standard_error", lag_table_to_json(mc.standard_error)},
               {"max_abs_deviation", mc.max_abs_deviation},
               {"max_standard_score", mc.max_standard_score}};
  emit(s.out, "ok",
       {{"max_abs_deviation", mc.max_abs_deviation}, {"max_standard_score", mc.max_standard_score}},
       std::move(data));
  s.err << "simulate-displacement: " << mc.samples << " samples, max deviation " << mc.max_abs_deviation
        << " (" << mc.max_standard_score << " standard errors)\n";
  return 0;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw DomainError("cannot write " + path);
  return file;
}

int sample_quadrature_cmd(const Options& o, const Streams& s) {
  const auto phi = io::spectrum_from_json(read_json(o.input, s.in));
  const auto r = validate_spectrum(phi, o.tol);
  if (!r.valid()) return invalid(s, "sample-quadrature", r);
  const auto [q, p] = marginal_spectra(phi);
  const auto paths = sample_quadrature_process(o.quadrature == "q" ? q : p, o.length, o.seed, o.tol);
  {
    auto file = open_output(o.output);
    io::write_paths_csv(file, paths, o.quadrature.front());
  }
  std::vector<double> variance;
  for (Eigen::Index i = 0; i < paths.rows(); ++i) variance.push_back(paths.row(i).squaredNorm() / paths.cols());
  emit(s.out, "ok", json::object(),
       {{"quadrature", o.quadrature},
        {"modes", paths.rows()},
        {"length", paths.cols()},
        {"seed", o.seed},
        {"output", o.output},
        {"sample_variance", variance}});
  s.err << "sample-quadrature: wrote " << paths.rows() << " x " << paths.cols() << " paths to " << o.output
        << '\n';
  return 0;
}

int periodogram_cmd(const Options& o, const Streams& s) {
  RealMatrix paths;
  if (o.input == "-") {
    paths = io::read_paths_csv(s.in);
  } else {
    std::ifstream file(o.input);
    if (!file) throw DomainError("cannot open " + o.input);
    paths = io::read_paths_csv(file);
  }
  const auto pg = periodogram(paths, o.segments);
  {
    auto file = open_output(o.output);
    io::write_periodogram_csv(file, pg);
  }
  const ComplexMatrix integral = pg.integral();
  std::vector<double> diagonal;
  for (Eigen::Index i = 0; i < integral.rows(); ++i) diagonal.push_back(integral(i, i).real());
  emit(s.out, "ok", json::object(),
       {{"segments", pg.segments},
        {"segment_length", pg.segment_length},
        {"bins", pg.values.size()},
        {"output", o.output},
        {"integral", io::complex_matrix_to_json(integral)},
        {"mean_diagonal", diagonal}});
  s.err << "periodogram: " << pg.values.size() << " bins from " << pg.segments << " segments\n";
  return 0;
}

std::optional<double> env_tolerance() {
  const char* raw = std::getenv("KWM_TOL");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used == std::string(raw).size() && v > 0.0) return v;
  } catch (const std::exception&) {
  }
  throw DomainError(std::string("KWM_TOL is not a positive number: ") + raw);
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  const Streams streams{in, out, err};
  Options o;
  try {
    if (auto t = env_tolerance()) o.tol = *t;
  } catch (const DomainError& e) {
    err << "kwm: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Weakly stationary quantum process toolkit", "kwm"};
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);
  app.add_option("--tol", o.tol, "PSD tolerance, scaled by 1 + ||M||_inf (env KWM_TOL)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Seed for every random draw");

  std::vector<std::pair<CLI::App*, std::function<int(const Options&, const Streams&)>>> commands;
  auto add = [&](const char* name, const char* help, auto fn) {
    auto* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, fn);
    return sub;
  };
  auto input = [&](CLI::App* sub, const char* help) {
    sub->add_option("-i,--input", o.input, help)->capture_default_str();
  };
  auto tol_seed = [&](CLI::App* sub) {
    sub->add_option("--tol", o.tol, "PSD tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Seed for every random draw");
  };

  auto* vk = add("validate-kernel", "Check the uncertainty relation of a kernel on a window", validate_kernel_cmd);
  input(vk, "Kernel JSON, - for stdin");
  vk->add_option("-w,--window", o.window, "Sites as a..b or a,b,c")->required();
  tol_seed(vk);

  auto* vs = add("validate-spectrum", "Check a spectral measure", validate_spectrum_cmd);
  input(vs, "Spectrum JSON, - for stdin");
  tol_seed(vs);

  auto* ts = add("to-spectrum", "Spectral measure of a kernel", to_spectrum_cmd);
  input(ts, "Kernel JSON, - for stdin");
  ts->add_option("--form", o.form, "Density form on Z")
      ->check(CLI::IsMember({"fourier", "grid"}))
      ->capture_default_str();
  tol_seed(ts);

  auto* tk = add("to-kernel", "Autocovariance of a spectral measure", to_kernel_cmd);
  input(tk, "Spectrum JSON, - for stdin");
  tk->add_option("--lags", o.lags, "Lags as a..b or a,b,c (default: every resolved lag)");
  tol_seed(tk);

  auto* ds = add("design", "Build a valid spectrum from a covariance field", design_cmd);
  input(ds, "Design JSON, - for stdin");
  tol_seed(ds);

  auto* pn = add("photon-numbers", "Mean photon number per mode", photon_numbers_cmd);
  input(pn, "Spectrum JSON, - for stdin");
  tol_seed(pn);

  auto* dg = add("diagnose", "Decomposition, purity bound and mixing flags", diagnose_cmd);
  input(dg, "Spectrum JSON, - for stdin");
  tol_seed(dg);

  auto* sd = add("simulate-displacement", "Monte Carlo check of the displaced mixture",
                 simulate_displacement_cmd);
  sd->add_option("--kernel", o.kernel, "Quantum kernel JSON")->required();
  sd->add_option("--noise", o.noise, "Classical noise kernel JSON")->required();
  sd->add_option("-w,--window", o.window, "Sites as a..b or a,b,c")->required();
  sd->add_option("-n,--samples", o.samples, "Number of draws")->capture_default_str();
  tol_seed(sd);

  auto* sq = add("sample-quadrature", "Sample q or p paths of a spectrum", sample_quadrature_cmd);
  input(sq, "Spectrum JSON, - for stdin");
  sq->add_option("--quadrature", o.quadrature, "Quadrature family")
      ->check(CLI::IsMember({"q", "p"}))
      ->capture_default_str();
  sq->add_option("-L,--length", o.length, "Path length")->capture_default_str();
  sq->add_option("-o,--output", o.output, "CSV path file")->required();
  tol_seed(sq);

  auto* pg = add("periodogram", "Bartlett periodogram of sampled paths", periodogram_cmd);
  input(pg, "Paths CSV, - for stdin");
  pg->add_option("-m,--segments", o.segments, "Number of segments")->capture_default_str();
  pg->add_option("-o,--output", o.output, "Periodogram CSV")->required();
  tol_seed(pg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) return fn(o, streams);
    }
  } catch (const ValidationFailure& e) {
    emit(out, "invalid", margins_of(e.report()), io::report_to_json(e.report()));
    err << "kwm: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "kwm: error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace kwm::cli
