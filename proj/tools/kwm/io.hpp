#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "kwm/groups.hpp"
#include "kwm/kernels.hpp"
#include "kwm/linalg.hpp"
#include "kwm/periodogram.hpp"
#include "kwm/report.hpp"
#include "kwm/spectra.hpp"

namespace kwm::io {

using nlohmann::json;

json group_to_json(const Group& g);
Group group_from_json(const json& j);

json real_matrix_to_json(const RealMatrix& m);
RealMatrix real_matrix_from_json(const json& j, const std::string& where);

/// Complex entries are [re, im] pairs; plain numbers are read as real.
json complex_matrix_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const json& j, const std::string& where);
json complex_vector_to_json(const ComplexVector& v);

/// {"k", "group", "lags": [{"a", "matrix"}]}. Lags are written in label order.
json kernel_to_json(const AutocovarianceMap& k);
AutocovarianceMap kernel_from_json(const json& j);

/// {"k", "group", "density": {"form", "values"}, "atoms": [{"theta", "weight"}]}.
/// "grid" values are densities against the normalized Haar measure at every
/// dual sample; on a finite group that is N times the point mass.
json spectrum_to_json(const SpectralMeasure& phi);
SpectralMeasure spectrum_from_json(const json& j);

json report_to_json(const ValidationReport& r);

/// Reads a JSON document; a CLI report {"verdict", "margins", "data"} is
/// replaced by its "data" member so outputs can be piped back in.
json unwrap_report(json doc);

/// Long format `site,mode,component,value` with component q or p.
void write_paths_csv(std::ostream& out, const RealMatrix& paths, char component);
/// Accepts the long format or a headerless wide k x L matrix.
RealMatrix read_paths_csv(std::istream& in);

/// `theta,entry_11_re,entry_11_im,...` with 1-based row-major entry indices.
void write_periodogram_csv(std::ostream& out, const Periodogram& p);

}  // namespace kwm::io
