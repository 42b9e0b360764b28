//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "liemom/experiments.hpp"

namespace liemom {

using json = nlohmann::json;

// Writes to a sibling temporary file and renames it into place, so readers never
// observe a truncated file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- matrices ----------------------------------------------------------------

inline json matrix_to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

inline Matrix matrix_from_json(const json& a, int n) {
  if (!a.is_array() || a.size() != static_cast<std::size_t>(n) * n)
    throw ConfigError("B", "expected a row-major array of " + std::to_string(n * n) + " numbers");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = a.at(static_cast<std::size_t>(i) * n + j).get<double>();
  return m;
}

// A square row-major array of length n^2; n is inferred.
inline Matrix square_matrix_from_json(const json& a) {
  if (!a.is_array()) throw ConfigError("B", "expected an array");
  const int n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(a.size()))));
  if (n < 1 || static_cast<std::size_t>(n) * n != a.size()) throw ConfigError("B", "array length is not a square");
  return matrix_from_json(a, n);
}

// ---- potential specs -----------------------------------------------------------

// {n, kappa, seed} or {B: row-major}
struct PotentialSpec {
  std::optional<SpectrumSpec> spectrum;
  std::uint64_t seed = 0;
  std::optional<Matrix> B;

  BrockettPotential build() const {
    if (B) return BrockettPotential(*B);
    if (!spectrum) throw ConfigError("potential", "needs either {n, kappa, seed} or {B}");
    Rng rng(seed);
    return BrockettPotential::from_spec(*spectrum, rng);
  }
};

inline json to_json(const PotentialSpec& p) {
  if (p.B) return json{{"B", matrix_to_json(*p.B)}};
  return json{{"n", p.spectrum->n}, {"kappa", p.spectrum->kappa}, {"seed", p.seed}};
}

inline PotentialSpec potential_spec_from_json(const json& j) {
  PotentialSpec p;
  if (j.contains("B")) {
    p.B = square_matrix_from_json(j.at("B"));
    return p;
  }
  for (const char* key : {"n", "kappa", "seed"})
    if (!j.contains(key)) throw ConfigError(key, "missing from potential spec");
  p.spectrum = SpectrumSpec{j.at("n").get<int>(), j.at("kappa").get<double>()};
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

// ---- params, configs, reports ------------------------------------------------

inline json to_json(const SchemeParams& p) {
  return json{{"scheme", scheme_name(p.scheme)}, {"h", p.h}, {"gamma", p.gamma}, {"a", p.a}};
}

inline json to_json(const Smoothness& s) { return json{{"L", s.L}, {"mu", s.mu}, {"kappa", s.kappa()}}; }

inline json to_json(const SweepConfig& c) {
  json j{{"n", c.n},
         {"kappas", c.kappas},
         {"seeds", c.seeds},
         {"max_iters", c.max_iters},
         {"eps", c.eps},
         {"init_mode", init_mode_name(c.init_mode)},
         {"init_radius", c.init_radius},
         {"a", c.a},
         {"monitor_energy", c.monitor_energy},
         {"monitor_lyapunov", c.monitor_lyapunov},
         {"record_every", c.record_every}};
  json schemes = json::array();
  for (Scheme s : c.schemes) schemes.push_back(scheme_name(s));
  j["schemes"] = schemes;
  j["h"] = c.h ? json(*c.h) : json(nullptr);
  j["gamma"] = c.gamma ? json(*c.gamma) : json(nullptr);
  return j;
}

// Applies the keys present in `j` on top of `c` (file values over defaults).
inline void apply_json(SweepConfig& c, const json& j) {
  auto field = [&](const char* key, auto& target) {
    if (!j.contains(key)) return;
    try {
      target = j.at(key).get<std::decay_t<decltype(target)>>();
    } catch (const json::exception& e) {
      throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
  };
  field("n", c.n);
  field("kappas", c.kappas);
  field("seeds", c.seeds);
  field("max_iters", c.max_iters);
  field("eps", c.eps);
  field("init_radius", c.init_radius);
  field("a", c.a);
  field("monitor_energy", c.monitor_energy);
  field("monitor_lyapunov", c.monitor_lyapunov);
  field("record_every", c.record_every);
  if (j.contains("kappa")) c.kappas = {j.at("kappa").get<double>()};
  if (j.contains("seed")) c.seeds = {j.at("seed").get<std::uint64_t>()};
  if (j.contains("init_mode")) c.init_mode = parse_init_mode(j.at("init_mode").get<std::string>());
  if (j.contains("scheme")) c.schemes = {parse_scheme(j.at("scheme").get<std::string>())};
  if (j.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : j.at("schemes")) c.schemes.push_back(parse_scheme(s.get<std::string>()));
  }
  if (j.contains("h") && !j.at("h").is_null()) c.h = j.at("h").get<double>();
  if (j.contains("gamma") && !j.at("gamma").is_null()) c.gamma = j.at("gamma").get<double>();
}

inline json to_json(const ViolationEvent& e) { return json{{"k", e.k}, {"value", e.value}, {"bound", e.bound}}; }

inline json to_json(const EnergyReport& r) {
  json checks = json::array();
  for (std::size_t i = 0; i < r.decrement_coefficients.size(); ++i) {
    json events = json::array();
    for (std::size_t e = 0; e < std::min<std::size_t>(r.events[i].size(), 20); ++e) events.push_back(to_json(r.events[i][e]));
    checks.push_back({{"bound", "dE <= -" + std::to_string(r.decrement_coefficients[i]) + " * gamma*h*|xi_k|^2"},
                      {"coefficient", r.decrement_coefficients[i]},
                      {"violations", r.violations[i]},
                      {"first_events", events}});
  }
  return json{{"steps", r.steps}, {"increases", r.increases}, {"max_increase", r.max_increase}, {"checks", checks}};
}

inline json to_json(const LyapunovReport& r) {
  json events = json::array();
  for (std::size_t e = 0; e < std::min<std::size_t>(r.events.size(), 20); ++e) events.push_back(to_json(r.events[e]));
  return json{{"theoretical_rate", r.rate},
              {"ball_radius", r.radius},
              {"first_entry", r.first_entry ? json(*r.first_entry) : json(nullptr)},
              {"steps_checked", r.steps_checked},
              {"violations", r.violations},
              {"increases", r.increases},
              {"undefined", r.undefined},
              {"max_ratio", r.max_ratio},
              {"min_value", std::isfinite(r.min_value) ? json(r.min_value) : json(nullptr)},
              {"first_events", events}};
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const RunSummary& s) {
  return json{{"scheme", scheme_name(s.scheme)},
              {"kappa", s.kappa},
              {"seed", s.seed},
              {"params", to_json(s.params)},
              {"smoothness", to_json(s.smoothness)},
              {"iterations", s.iterations},
              {"converged", s.converged},
              {"initial_subopt", finite_or_null(s.initial_subopt)},
              {"final_subopt", finite_or_null(s.final_subopt)},
              {"c_emp", s.c_emp ? json(*s.c_emp) : json(nullptr)},
              {"one_minus_c", s.c_emp ? json(1.0 - *s.c_emp) : json(nullptr)},
              {"rate_error", s.rate_error},
              {"subopt_increases", s.subopt_increases},
              {"max_orthogonality_defect", s.max_orthogonality_defect},
              {"energy", to_json(s.energy)},
              {"lyapunov", to_json(s.lyapunov)}};
}

inline json to_json(const RateFit& f) {
  json j{{"scheme", scheme_name(f.scheme)}, {"kappas", f.kappas}, {"c_emp_median", f.c_emp}, {"c_emp_seeds", f.c_seeds}};
  if (f.fit) {
    j["slope"] = f.fit->slope;
    j["intercept"] = f.fit->intercept;
    j["r_squared"] = f.fit->r_squared;
    j["residuals"] = f.fit->residuals;
  } else {
    j["slope"] = nullptr;
    j["error"] = f.error;
  }
  return j;
}

// ---- traces ------------------------------------------------------------------

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "k,t,U,subopt,xi_norm,E,L,ratio,distance\n";
  for (const TraceRow& r : rows) {
    out += std::to_string(r.k);
    for (double v : {r.t, r.value, r.subopt, r.xi_norm, r.energy, r.lyapunov, r.ratio, r.distance}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline json to_json(const StateRecord& s) {
  return json{{"k", s.k}, {"g", matrix_to_json(s.g)}, {"g_prev", matrix_to_json(s.g_prev)}, {"xi", matrix_to_json(s.xi)}};
}

inline StateRecord state_from_json(const json& j) {
  const int n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(j.at("g").size()))));
  return {j.at("k").get<long>(), matrix_from_json(j.at("g"), n), matrix_from_json(j.at("g_prev"), n),
          matrix_from_json(j.at("xi"), n)};
}

}  // namespace liemom
