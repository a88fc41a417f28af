#include "rmt/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace rmt::io {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

double parse_double(const std::string& token, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    while (used < token.size() && std::isspace(static_cast<unsigned char>(token[used]))) ++used;
    if (used != token.size()) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError("invalid number '" + token + "' in " + where);
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

DiscreteMeasure measure_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("atoms") || !j.at("atoms").is_array())
      throw InputError("measure JSON needs an \"atoms\" array");
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) atoms.push_back({a.at("value").get<double>(), a.at("weight").get<double>()});
    return DiscreteMeasure(std::move(atoms));
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed measure: ") + e.what());
  }
}

json measure_to_json(const DiscreteMeasure& m) {
  json atoms = json::array();
  for (const auto& a : m.atoms()) atoms.push_back({{"value", a.value}, {"weight", a.weight}});
  return {{"atoms", atoms}};
}

DiscreteMeasure read_measure_file(const std::string& path) {
  return measure_from_json(read_json_file(path));
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    std::vector<double> row;
    for (const auto& tok : split(line, ',')) row.push_back(parse_double(tok, path));
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError("ragged rows in '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("empty matrix file '" + path + "'");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << num(m(i, j));
    os << '\n';
  }
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  for (double l : s.eigenvalues) os << num(l) << '\n';
}

Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  Spectrum s;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    s.eigenvalues.push_back(parse_double(line, path));
  }
  if (s.eigenvalues.empty()) throw InputError("empty spectrum");
  if (!std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()))
    throw InputError("spectrum in '" + path + "' is not ascending");
  s.source_dim = s.eigenvalues.size();
  return s;
}

void write_density_csv(std::ostream& os, std::span<const DensityPoint> pts) {
  os << "x,density,cdf\n";
  for (const auto& p : pts) os << num(p.x) << ',' << num(p.density) << ',' << num(p.cdf) << '\n';
}

std::vector<DensityPoint> read_density_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,density,cdf", 0) != 0)
    throw InputError("'" + path + "' lacks the x,density,cdf header");
  std::vector<DensityPoint> pts;
  while (std::getline(in, line)) {
    if (blank(line)) continue;
    const auto tok = split(line, ',');
    if (tok.size() != 3) throw InputError("density rows need three columns in '" + path + "'");
    pts.push_back({parse_double(tok[0], path), parse_double(tok[1], path), parse_double(tok[2], path)});
  }
  if (pts.empty()) throw InputError("empty density file '" + path + "'");
  return pts;
}

ModelFile model_from_json(const json& j) {
  try {
    ModelFile out;
    PopulationModel& m = out.model;
    m.family = family_from_string(j.at("family").get<std::string>());
    m.n = j.at("n").get<std::size_t>();
    m.p = j.at("p").get<std::size_t>();
    m.d = get_or<std::size_t>(j, "d", m.p);
    if (j.contains("shape")) {
      const json& s = j.at("shape");
      const std::string kind = s.at("kind").get<std::string>();
      if (kind == "identity") {
        // empty shape
      } else if (kind == "toeplitz") {
        const double r = s.at("r").get<double>();
        m.shape = toeplitz_corr(m.p, r).matrix();
        m.toeplitz_r = r;
      } else if (kind == "diagonal") {
        const auto v = s.at("values").get<std::vector<double>>();
        m.shape = SymMatrix::diagonal(v).matrix();
      } else if (kind == "file") {
        m.shape = read_matrix_csv(s.at("path").get<std::string>());
      } else {
        throw InputError("unknown shape kind '" + kind + "'");
      }
    }
    if (j.contains("mixing")) m.mixing = measure_from_json(j.at("mixing"));
    m.mixing_schedule = get_or<std::vector<double>>(j, "mixing_schedule", {});
    m.b_exponent = get_or<double>(j, "b", 2.0);
    m.bound = get_or<double>(j, "bound", 1.0);
    if (j.contains("location")) {
      const auto loc = j.at("location").get<std::vector<double>>();
      m.location = Eigen::Map<const Eigen::VectorXd>(loc.data(), static_cast<Eigen::Index>(loc.size()));
    }
    const std::string noise = get_or<std::string>(j, "noise", "normal");
    if (noise == "normal") {
      m.noise = NoiseKind::kNormal;
    } else if (noise == "uniform") {
      m.noise = NoiseKind::kUniform;
    } else {
      throw InputError("unknown noise '" + noise + "'");
    }
    if (j.contains("seed")) out.seed = j.at("seed").get<std::uint64_t>();
    m.validate();
    return out;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model: ") + e.what());
  }
}

json model_to_json(const PopulationModel& m) {
  json j{{"family", to_string(m.family)}, {"n", m.n}, {"p", m.p}, {"d", m.row_dim()}};
  if (m.toeplitz_r) {
    j["shape"] = {{"kind", "toeplitz"}, {"r", *m.toeplitz_r}};
  } else if (m.shape.size() == 0) {
    j["shape"] = {{"kind", "identity"}};
  } else {
    j["shape"] = {{"kind", "matrix"}, {"rows", m.shape.rows()}, {"cols", m.shape.cols()}};
  }
  if (m.mixing) j["mixing"] = measure_to_json(*m.mixing);
  if (!m.mixing_schedule.empty()) j["mixing_schedule"] = m.mixing_schedule;
  if (m.family == Family::kLbBall) j["b"] = m.b_exponent;
  if (m.family == Family::kBoundedIid) j["bound"] = m.bound;
  if (m.location.size() != 0) j["location"] = to_vector(m.location);
  if (m.family == Family::kGaussian) j["noise"] = m.noise == NoiseKind::kNormal ? "normal" : "uniform";
  return j;
}

EllipticalParams elliptical_params_from_json(const json& j) {
  try {
    std::optional<double> xi;
    if (j.contains("xi")) xi = j.at("xi").get<double>();
    return EllipticalParams(measure_from_json(j.at("H")), measure_from_json(j.at("nu")),
                            j.at("theta").get<double>(), j.at("rho").get<double>(), xi);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed elliptical parameters: ") + e.what());
  }
}

ExperimentSpec experiment_from_json(const json& j) {
  try {
    ExperimentSpec spec;
    ModelFile mf = model_from_json(j.at("model"));
    spec.model = std::move(mf.model);
    const std::string law = j.at("law").get<std::string>();
    if (law == "mp") {
      spec.law = Law::kMp;
    } else if (law == "elliptical") {
      spec.law = Law::kElliptical;
    } else {
      throw InputError("unknown law '" + law + "'");
    }
    const std::string src = get_or<std::string>(j, "h_source", "empirical");
    if (src == "empirical") {
      spec.h_source = HSource::kEmpirical;
    } else if (src == "analytic") {
      spec.h_source = HSource::kAnalytic;
    } else {
      throw InputError("unknown h_source '" + src + "'");
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      spec.grid = GridSpec{g.at("min").get<double>(), g.at("max").get<double>(), g.at("count").get<std::size_t>()};
    }
    spec.replicates = get_or<std::size_t>(j, "replicates", 1);
    spec.seed = Seed{get_or<std::uint64_t>(j, "seed", mf.seed.value_or(0))};
    spec.column_scale = get_or<std::vector<double>>(j, "column_scale", {});
    spec.predict_edge = get_or<bool>(j, "predict_edge", false);
    return spec;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed experiment: ") + e.what());
  }
}

json comparison_to_json(const ComparisonResult& r) {
  json j{{"ks_distance", r.ks_distance},
         {"ks_per_replicate", r.ks_per_replicate},
         {"ecdf_count", r.ecdf_count},
         {"empirical_support", {r.empirical_min, r.empirical_max}},
         {"largest_eigenvalue", r.largest_eigenvalue},
         {"largest_per_replicate", r.largest_per_replicate}};
  j["theoretical_support"] = r.theoretical_support
                                 ? json{r.theoretical_support->first, r.theoretical_support->second}
                                 : json(nullptr);
  j["edge_prediction"] = r.edge_prediction ? json(*r.edge_prediction) : json(nullptr);
  j["diagonal_statistic"] = r.diagonal_statistic ? json(*r.diagonal_statistic) : json(nullptr);
  return j;
}

json report_to_json(const ConcentrationReport& r) {
  json dims = json::array();
  json thresholds = json::array();
  json frequencies = json::array();
  json bounds = json::array();
  json details = json::array();
  std::size_t reps = 0;
  for (const auto& d : r.dims) {
    dims.push_back(d.p);
    thresholds.push_back(d.thresholds);
    frequencies.push_back(d.frequencies);
    bounds.push_back(d.bounds);
    reps = std::max(reps, d.reps);
    json item{{"label", d.label},
              {"n", d.n},
              {"p", d.p},
              {"reps", d.reps},
              {"mean_deviation", d.mean_deviation},
              {"max_deviation", d.max_deviation},
              {"sd", d.sd},
              {"bounds_raw", d.bounds_raw},
              {"standard_errors", d.standard_errors}};
    item["sigma_norm_over_log_p"] = d.sigma_norm_over_log_p ? json(*d.sigma_norm_over_log_p) : json(nullptr);
    details.push_back(std::move(item));
  }
  return {{"statistic", r.statistic}, {"dims", dims},         {"reps", reps},
          {"thresholds", thresholds}, {"frequencies", frequencies}, {"bounds", bounds},
          {"seed", r.seed},           {"passed", r.passed},   {"failures", r.failures},
          {"details", details}};
}

}  // namespace rmt::io
