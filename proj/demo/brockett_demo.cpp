//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
// Start next to the global maximum of a Brockett potential and watch each scheme
// leave it. Usage: brockett_demo [config.json] [output.svg]

#include <cstdio>
#include <string>

#include "liemom/liemom.hpp"

using namespace liemom;

int main(int argc, char** argv) {
  SweepConfig cfg;
  cfg.kappas = {1000.0};
  cfg.seeds = {1};
  cfg.schemes = {Scheme::GD, Scheme::HeavyBall, Scheme::NAGSC};
  cfg.init_mode = InitMode::NearMax;
  cfg.eps = 1e-10;
  cfg.max_iters = 2'000'000;
  try {
    if (argc > 1) apply_json(cfg, json::parse(read_file(argv[1])));
    cfg.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config: %s\n", e.what());
    return 1;
  }
  const std::string out = argc > 2 ? argv[2] : "escape.svg";

  std::vector<svg::Series> curves;
  for (Scheme s : cfg.schemes) {
    const RunTrace tr = run_single(cfg, s, cfg.kappas.front(), cfg.seeds.front());
    std::printf("%-10s %s in %8ld iterations, U - U* from %.4g to %.3g\n", std::string(scheme_name(s)).c_str(),
                tr.converged ? "converged" : "stopped  ", tr.iterations, tr.initial_subopt(), tr.final_subopt());
    curves.push_back(svg::convergence_series(std::string(scheme_name(s)), tr.rows));
  }
  char title[80];
  std::snprintf(title, sizeof title, "Escape from the maximum, n = %d, kappa = %g", cfg.n, cfg.kappas.front());
  write_file_atomic(out, svg::render(svg::convergence_plot(title, std::move(curves))));
  std::printf("plot: %s\n", out.c_str());
  return 0;
}
