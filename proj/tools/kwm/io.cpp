#include "io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "kwm/errors.hpp"

namespace kwm::io {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw DomainError(where + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw DomainError(where + ": expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw DomainError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

Complex complex_entry(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], where), number(j[1], where)};
  throw DomainError(where + ": expected a number or an [re, im] pair");
}

// Rows of equal length; `entry` converts one element.
template <class Scalar, class Entry>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_from_rows(const json& j,
                                                                       const std::string& where,
                                                                       Entry entry) {
  if (!j.is_array() || j.empty()) throw DomainError(where + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = j[0].is_array() ? static_cast<Eigen::Index>(j[0].size()) : 0;
  if (cols == 0) throw DomainError(where + ": rows must be non-empty arrays");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DomainError(where + ": ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = entry(row[static_cast<std::size_t>(c)], where);
  }
  return m;
}

std::size_t modes_of(const json& j, const std::string& where) {
  const auto k = integer(member(j, "k", where), where + ".k");
  if (k < 1) throw DomainError(where + ".k: must be at least 1");
  return static_cast<std::size_t>(k);
}

Lag lag_from_json(const Group& g, const json& a, const std::string& where) {
  if (a.is_array()) {
    std::vector<std::int64_t> coords;
    for (const auto& c : a) coords.push_back(integer(c, where));
    return g.reduce(coords);
  }
  return g.reduce(integer(a, where));
}

}  // namespace

json group_to_json(const Group& g) {
  if (g.is_finite()) return {{"kind", "ZN"}, {"moduli", g.moduli()}};
  return {{"kind", "Z"}, {"dual_grid_size", g.dual_grid_size()}};
}

Group group_from_json(const json& j) {
  const auto& kind = member(j, "kind", "group");
  if (kind == "Z") {
    std::size_t grid = 256;
    if (j.contains("dual_grid_size")) {
      const auto g = integer(j.at("dual_grid_size"), "group.dual_grid_size");
      if (g < 2) throw DomainError("group.dual_grid_size: must be at least 2");
      grid = static_cast<std::size_t>(g);
    }
    return Group::integers(grid);
  }
  if (kind == "ZN") {
    std::vector<std::int64_t> moduli;
    const auto& mj = member(j, "moduli", "group");
    if (!mj.is_array()) throw DomainError("group.moduli: expected an array");
    for (const auto& n : mj) moduli.push_back(integer(n, "group.moduli"));
    return Group::cyclic_product(std::move(moduli));
  }
  throw DomainError("group.kind: expected \"Z\" or \"ZN\"");
}

json real_matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix real_matrix_from_json(const json& j, const std::string& where) {
  return matrix_from_rows<double>(j, where, number);
}

json complex_matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix complex_matrix_from_json(const json& j, const std::string& where) {
  return matrix_from_rows<Complex>(j, where, complex_entry);
}

json complex_vector_to_json(const ComplexVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

json kernel_to_json(const AutocovarianceMap& k) {
  json lags = json::array();
  for (const auto& [a, m] : k.table()) lags.push_back({{"a", a}, {"matrix", real_matrix_to_json(m)}});
  return {{"k", k.modes()}, {"group", group_to_json(k.group())}, {"lags", std::move(lags)}};
}

AutocovarianceMap kernel_from_json(const json& j) {
  const auto modes = modes_of(j, "kernel");
  const Group g = group_from_json(member(j, "group", "kernel"));
  const auto& lags = member(j, "lags", "kernel");
  if (!lags.is_array()) throw DomainError("kernel.lags: expected an array");
  std::map<Lag, RealMatrix> table;
  for (std::size_t i = 0; i < lags.size(); ++i) {
    const std::string where = "kernel.lags[" + std::to_string(i) + "]";
    const Lag a = lag_from_json(g, member(lags[i], "a", where), where + ".a");
    auto m = real_matrix_from_json(member(lags[i], "matrix", where), where + ".matrix");
    if (!table.emplace(a, std::move(m)).second) {
      throw DomainError(where + ": lag " + std::to_string(a) + " listed twice");
    }
  }
  return AutocovarianceMap(g, modes, std::move(table));
}

json spectrum_to_json(const SpectralMeasure& phi) {
  json density;
  if (phi.form() == DensityForm::Fourier) {
    json values = json::array();
    for (const auto& [a, c] : phi.coefficients()) {
      values.push_back({{"a", a}, {"matrix", complex_matrix_to_json(c)}});
    }
    density = {{"form", "fourier"}, {"values", std::move(values)}};
  } else {
    json values = json::array();
    for (std::size_t j = 0; j < phi.group().dual_size(); ++j) {
      values.push_back(complex_matrix_to_json(phi.density_at(j)));
    }
    density = {{"form", "grid"}, {"values", std::move(values)}};
  }
  json atoms = json::array();
  for (const auto& atom : phi.atoms()) {
    atoms.push_back({{"theta", atom.angle}, {"weight", complex_matrix_to_json(atom.weight)}});
  }
  return {{"k", phi.modes()},
          {"group", group_to_json(phi.group())},
          {"density", std::move(density)},
          {"atoms", std::move(atoms)}};
}

SpectralMeasure spectrum_from_json(const json& j) {
  const auto modes = modes_of(j, "spectrum");
  const std::size_t dim = 2 * modes;
  const Group g = group_from_json(member(j, "group", "spectrum"));
  const auto& density = member(j, "density", "spectrum");
  const auto& form = member(density, "form", "spectrum.density");
  const auto& values = member(density, "values", "spectrum.density");
  if (!values.is_array()) throw DomainError("spectrum.density.values: expected an array");

  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    const auto& aj = j.at("atoms");
    if (!aj.is_array()) throw DomainError("spectrum.atoms: expected an array");
    for (std::size_t i = 0; i < aj.size(); ++i) {
      const std::string where = "spectrum.atoms[" + std::to_string(i) + "]";
      atoms.push_back({number(member(aj[i], "theta", where), where + ".theta"),
                       complex_matrix_from_json(member(aj[i], "weight", where), where + ".weight")});
    }
  }

  if (form == "fourier") {
    if (g.is_finite()) throw DomainError("spectrum.density: fourier form needs group Z");
    std::map<Lag, ComplexMatrix> coefficients;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::string where = "spectrum.density.values[" + std::to_string(i) + "]";
      const Lag a = integer(member(values[i], "a", where), where + ".a");
      auto c = complex_matrix_from_json(member(values[i], "matrix", where), where + ".matrix");
      if (!coefficients.emplace(a, std::move(c)).second) {
        throw DomainError(where + ": coefficient " + std::to_string(a) + " listed twice");
      }
    }
    return SpectralMeasure::fourier(g, dim, std::move(coefficients), std::move(atoms));
  }
  if (form != "grid") throw DomainError("spectrum.density.form: expected \"grid\" or \"fourier\"");

  std::vector<ComplexMatrix> samples;
  samples.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    samples.push_back(
        complex_matrix_from_json(values[i], "spectrum.density.values[" + std::to_string(i) + "]"));
  }
  if (!g.is_finite()) return SpectralMeasure::grid(g, dim, std::move(samples), std::move(atoms));
  if (!atoms.empty()) throw DomainError("spectrum.atoms: finite groups carry mass in the grid values");
  const double n = static_cast<double>(g.order());
  for (auto& s : samples) s /= n;
  return SpectralMeasure::table(g, dim, std::move(samples));
}

json report_to_json(const ValidationReport& r) {
  json details = json::array();
  for (const auto& d : r.details) {
    details.push_back(
        {{"name", d.name}, {"passed", d.passed}, {"min_value", d.min_value}, {"detail", d.detail}});
  }
  json violations = json::array();
  for (const auto& v : r.violations) {
    json item = {{"index", v.index}, {"min_eigenvalue", v.min_eigenvalue}};
    if (std::isfinite(v.angle)) item["theta"] = v.angle;
    violations.push_back(std::move(item));
  }
  json out = {{"verdict", to_string(r.verdict)},
              {"min_eigenvalue", r.min_eigenvalue},
              {"margin", r.margin},
              {"threshold", r.threshold},
              {"details", std::move(details)},
              {"violations", std::move(violations)}};
  out["certificate"] = r.certificate ? complex_vector_to_json(*r.certificate) : json(nullptr);
  out["certificate_point"] = r.certificate_point ? json(*r.certificate_point) : json(nullptr);
  return out;
}

json unwrap_report(json doc) {
  if (doc.is_object() && doc.contains("verdict") && doc.contains("data") && doc.contains("margins")) {
    return doc.at("data");
  }
  return doc;
}

void write_paths_csv(std::ostream& out, const RealMatrix& paths, char component) {
  out << "site,mode,component,value\n";
  for (Eigen::Index t = 0; t < paths.cols(); ++t) {
    for (Eigen::Index r = 0; r < paths.rows(); ++r) {
      out << t << ',' << r + 1 << ',' << component << ',' << format_double(paths(r, t)) << '\n';
    }
  }
}

RealMatrix read_paths_csv(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw DomainError("paths CSV: no data");

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    return cells;
  };
  auto parse = [](const std::string& cell, std::size_t line_no) {
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used == cell.size()) return v;
    } catch (const std::exception&) {
    }
    throw DomainError("paths CSV line " + std::to_string(line_no) + ": bad number \"" + cell + "\"");
  };

  if (lines.front().rfind("site,", 0) == 0) {
    std::map<std::pair<long, long>, double> cells;
    long sites = 0, modes = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto c = split(lines[i]);
      if (c.size() != 4) throw DomainError("paths CSV line " + std::to_string(i + 1) + ": expected 4 fields");
      const auto site = static_cast<long>(parse(c[0], i + 1));
      const auto mode = static_cast<long>(parse(c[1], i + 1));
      if (site < 0 || mode < 1) throw DomainError("paths CSV line " + std::to_string(i + 1) + ": bad index");
      cells[{mode - 1, site}] = parse(c[3], i + 1);
      sites = std::max(sites, site + 1);
      modes = std::max(modes, mode);
    }
    if (static_cast<long>(cells.size()) != sites * modes) throw DomainError("paths CSV: missing entries");
    RealMatrix m(modes, sites);
    for (const auto& [key, v] : cells) m(key.first, key.second) = v;
    return m;
  }

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::vector<double> row;
    for (const auto& cell : split(lines[i])) row.push_back(parse(cell, i + 1));
    if (!rows.empty() && row.size() != rows.front().size()) throw DomainError("paths CSV: ragged rows");
    rows.push_back(std::move(row));
  }
  RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

void write_periodogram_csv(std::ostream& out, const Periodogram& p) {
  const Eigen::Index k = p.values.empty() ? 0 : p.values.front().rows();
  out << "theta";
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      out << ",entry_" << i + 1 << j + 1 << "_re,entry_" << i + 1 << j + 1 << "_im";
    }
  }
  out << '\n';
  for (std::size_t f = 0; f < p.values.size(); ++f) {
    out << format_double(p.angles[f]);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        out << ',' << format_double(p.values[f](i, j).real()) << ','
            << format_double(p.values[f](i, j).imag());
      }
    }
    out << '\n';
  }
}

}  // namespace kwm::io
