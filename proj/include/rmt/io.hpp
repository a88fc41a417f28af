#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "rmt/concentration.hpp"
#include "rmt/elliptical_solver.hpp"
#include "rmt/experiments.hpp"
#include "rmt/measure.hpp"
#include "rmt/samplers.hpp"
#include "rmt/stieltjes.hpp"

namespace rmt::io {

using nlohmann::json;

/// Formats with 17 significant digits.
std::string num(double v);

json read_json_file(const std::string& path);

// {"atoms":[{"value": v, "weight": w}, ...]}
DiscreteMeasure measure_from_json(const json& j);
json measure_to_json(const DiscreteMeasure& m);
DiscreteMeasure read_measure_file(const std::string& path);

/// Plain rows of comma-separated decimals.
Eigen::MatrixXd read_matrix_csv(const std::string& path);
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

/// One eigenvalue per line, ascending.
void write_spectrum_csv(std::ostream& os, const Spectrum& s);
Spectrum read_spectrum_csv(const std::string& path);

/// Header "x,density,cdf".
void write_density_csv(std::ostream& os, std::span<const DensityPoint> pts);
std::vector<DensityPoint> read_density_csv(const std::string& path);

struct ModelFile {
  PopulationModel model;
  std::optional<std::uint64_t> seed;
};

/// {"family":, "n":, "p":, "d":, "shape": {"kind": "identity"|"toeplitz"|"file"|"diagonal", ...},
///  "mixing": {"atoms": [...]}, "mixing_schedule": [...], "b":, "bound":,
///  "location": [...], "noise": "normal"|"uniform", "seed":}
ModelFile model_from_json(const json& j);
json model_to_json(const PopulationModel& m);

/// {"H": {...}, "nu": {...}, "theta":, "rho":, "xi": (optional)}
EllipticalParams elliptical_params_from_json(const json& j);

/// {"model": {...}, "law": "mp"|"elliptical", "h_source": "analytic"|"empirical",
///  "grid": {"min":, "max":, "count":}, "replicates":, "seed":,
///  "column_scale": [...], "predict_edge": bool}
ExperimentSpec experiment_from_json(const json& j);

json comparison_to_json(const ComparisonResult& r);
json report_to_json(const ConcentrationReport& r);

}  // namespace rmt::io
