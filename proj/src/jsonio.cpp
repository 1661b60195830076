#include "aniso/jsonio.hpp"

#include <fstream>
#include <stdexcept>

namespace aniso {

json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("parse error in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
}

json cover_params_to_json(const CoverParams& p) {
  return json{{"a1", p.a1}, {"a2", p.a2}, {"a3", p.a3}, {"a4", p.a4},
              {"a5", p.a5}, {"a6", p.a6}, {"J", p.J}};
}

CoverParams cover_params_from_json(const json& j) {
  CoverParams p;
  p.a1 = j.at("a1").get<double>();
  p.a2 = j.at("a2").get<double>();
  p.a3 = j.at("a3").get<double>();
  p.a4 = j.at("a4").get<double>();
  p.a5 = j.at("a5").get<double>();
  p.a6 = j.at("a6").get<double>();
  p.J = j.value("J", 0);
  return p;
}

AnisotropicCover cover_from_json(const json& j) {
  const int dim = j.at("dimension").get<int>();
  const std::string family = j.at("family").get<std::string>();
  const json params = j.value("params", json::object());
  const double scale = params.value("scale", 1.0);

  AnisotropicCover cover = [&] {
    if (family == "isotropic") return AnisotropicCover::isotropic(dim, scale);
    if (family == "constant_matrix") {
      const auto exps = params.at("exponents").get<std::vector<double>>();
      if (static_cast<int>(exps.size()) != dim)
        throw std::runtime_error("constant_matrix: exponents size must equal dimension");
      return AnisotropicCover::constant_matrix(exps, scale);
    }
    if (family == "variable_diagonal") {
      if (dim != 2) throw std::runtime_error("variable_diagonal requires dimension 2");
      BField b;
      const json bj = params.value("b", json::object());
      const std::string kind = bj.value("kind", "sine");
      if (kind == "sine") {
        b.kind = BField::Kind::sine;
        b.offset = bj.value("offset", 0.5);
        b.amplitude = bj.value("amplitude", 0.25);
        b.frequency = bj.value("frequency", 1.0);
      } else if (kind == "jump") {
        b.kind = BField::Kind::jump;
        b.base = bj.value("base", 0.5);
        b.jump = bj.value("jump", 0.1);
      } else {
        throw std::runtime_error("unknown b-field kind: " + kind);
      }
      return AnisotropicCover::variable_diagonal(b, scale);
    }
    throw std::runtime_error("unknown cover family: " + family);
  }();

  if (j.contains("declared_constants")) {
    CoverParams p = cover_params_from_json(j.at("declared_constants"));
    if (p.J == 0 && cover.has_declared_params()) p.J = cover.declared_params()->J;
    p.validate();
    cover.set_declared_params(p);
  }
  if (j.contains("t_valid")) {
    const auto tv = j.at("t_valid").get<std::vector<double>>();
    if (tv.size() != 2) throw std::runtime_error("t_valid must be [lo, hi]");
    cover.set_validity(tv[0], tv[1]);
  }
  return cover;
}

AnisotropicCover cover_from_file(const std::string& path) {
  return cover_from_json(load_json_file(path));
}

TestFunction kernel_from_json(const json& j, int default_dim) {
  const std::string family = j.at("family").get<std::string>();
  const int dim = j.value("dimension", default_dim);
  const auto coeffs = j.value("coefficients", std::vector<double>{});
  if (family == "gaussian") {
    const double a = coeffs.size() > 0 ? coeffs[0] : 1.0;
    const double b = coeffs.size() > 1 ? coeffs[1] : 1.0;
    return TestFunction::gaussian(dim, a, b);
  }
  if (family == "hermite_gaussian") {
    if (coeffs.empty()) throw std::runtime_error("hermite_gaussian needs coefficients");
    return TestFunction::hermite_gaussian(dim, coeffs);
  }
  if (family == "bump") {
    const double a = coeffs.size() > 0 ? coeffs[0] : 1.0;
    const double w = coeffs.size() > 1 ? coeffs[1] : 1.0;
    return TestFunction::bump(dim, a, w);
  }
  throw std::runtime_error("unknown kernel family: " + family);
}

TestFunction kernel_from_file(const std::string& path, int default_dim) {
  return kernel_from_json(load_json_file(path), default_dim);
}

json config_to_json(const MaximalConfig& cfg) {
  return json{{"t_min", cfg.t_min},   {"t_max", cfg.t_max},       {"t_step", cfg.t_step},
              {"N", cfg.N},           {"Ntilde", cfg.Ntilde},     {"L", cfg.L},
              {"t0", cfg.t0},         {"aperture_l", cfg.aperture_l},
              {"p", cfg.p},           {"q", cfg.q},               {"Np", cfg.Np},
              {"Ntilde_p", cfg.Ntilde_p}};
}

MaximalConfig config_from_json(const json& j) {
  MaximalConfig cfg;
  cfg.t_min = j.value("t_min", cfg.t_min);
  cfg.t_max = j.value("t_max", cfg.t_max);
  cfg.t_step = j.value("t_step", cfg.t_step);
  cfg.N = j.value("N", cfg.N);
  cfg.Ntilde = j.value("Ntilde", cfg.Ntilde);
  cfg.L = j.value("L", cfg.L);
  cfg.t0 = j.value("t0", cfg.t0);
  cfg.aperture_l = j.value("aperture_l", cfg.aperture_l);
  cfg.p = j.value("p", cfg.p);
  cfg.q = j.value("q", cfg.q);
  cfg.Np = j.value("Np", cfg.Np);
  cfg.Ntilde_p = j.value("Ntilde_p", cfg.Ntilde_p);
  cfg.validate();
  return cfg;
}

json report_to_json(const VerificationReport& rep) {
  json cases = json::array();
  for (const auto& c : rep.cases)
    cases.push_back(json{{"label", c.label},
                         {"lhs", c.lhs},
                         {"rhs", c.rhs},
                         {"ratio", c.ratio},
                         {"pass", c.pass}});
  json j{{"check", rep.check},
         {"anchor", rep.anchor},
         {"cases", cases},
         {"empirical_constant", rep.empirical_constant},
         {"pass", rep.pass}};
  if (rep.refinement.checked)
    j["refinement"] = json{{"h", rep.refinement.h},
                           {"constant_h", rep.refinement.constant_h},
                           {"h2", rep.refinement.h2},
                           {"constant_h2", rep.refinement.constant_h2},
                           {"drift", rep.refinement.drift}};
  if (!rep.notes.empty()) j["notes"] = rep.notes;
  return j;
}

json validation_to_json(const CoverValidationReport& rep) {
  json violations = json::array();
  for (const auto& v : rep.violations) {
    json w{{"what", v.what}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"t", v.t}, {"s", v.s}};
    w["x"] = std::vector<double>(v.x.c.begin(), v.x.c.begin() + v.x.n);
    w["y"] = std::vector<double>(v.y.c.begin(), v.y.c.begin() + v.y.n);
    violations.push_back(w);
  }
  json j{{"samples", rep.samples},
         {"intersecting_pairs", rep.intersecting_pairs},
         {"volume", json{{"min", rep.vol_min}, {"max", rep.vol_max}}},
         {"fitted", cover_params_to_json(rep.fitted)},
         {"violations", violations},
         {"pass", rep.pass}};
  if (rep.has_declared) {
    j["declared"] = cover_params_to_json(rep.declared);
    j["shape_margins"] =
        json{{"lower_min", rep.lower_margin_min}, {"upper_max", rep.upper_margin_max}};
  }
  return j;
}

json field_sidecar_json(const MaximalField& field, const MaximalConfig& cfg) {
  json j{{"kind", field.kind}, {"config", config_to_json(cfg)}, {"flags", field.flags}};
  j["witnesses_summary"] = json{{"x_index", field.global_max.x_flat},
                                {"t", field.global_max.t},
                                {"y_index", field.global_max.y_flat},
                                {"value", field.global_max.value}};
  return j;
}

json decay_table_to_json(const DecayTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows)
    rows.push_back(json{{"k", r.k}, {"seminorm", r.seminorm}, {"log2_ratio", r.log2_ratio}});
  const bool finite = std::isfinite(table.lsq_slope);
  return json{{"rows", rows},
              {"lsq_slope", finite ? json(table.lsq_slope) : json("-inf")},
              {"fitted_points", table.fitted_points}};
}

}  // namespace aniso
