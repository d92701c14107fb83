// Copyright 2026 The imlab Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS-IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end: experiment runs, sandwich certificates, conformal
// oracle values and polygon geometry.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "imlab/conformal.hpp"
#include "imlab/errors.hpp"
#include "imlab/geometry.hpp"
#include "imlab/harness.hpp"

namespace {

using imlab::format_number;
using nlohmann::json;

void emit(const json& j, const std::string& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    std::cout << text;
    return;
  }
  FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw imlab::ConfigError("cannot write '" + path + "'");
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

void print_summary(const imlab::ConvergenceReport& r) {
  for (const imlab::ConvergenceSummary& s : r.summary) {
    std::printf("pair %zu system %c: max window gap %s (certified %s) %s\n", s.pair_id,
                imlab::system_code(s.system), format_number(s.max_window_gap).c_str(),
                format_number(s.max_window_certified_gap).c_str(), s.pass ? "PASS" : "FAIL");
  }
  if (r.sandwich) {
    std::printf("sandwich: %zu entries, %d case-2 stages, %zu reverify failures", r.sandwich->pairing.size(),
                r.sandwich->count_case2(), r.sandwich_reverify_failures.size());
    if (r.sandwich_report) std::printf(", %d chain failures", r.sandwich_report->failures);
    std::printf("\n");
  }
  for (const std::string& n : r.notes) std::printf("note: %s\n", n.c_str());
  if (!r.aborted.empty()) std::printf("aborted: %s\n", r.aborted.c_str());
  std::printf("%s\n", r.all_pass ? "all pass" : "FAILED");
}

int run_experiment(const std::string& path, const std::string& output, bool sandwich_only) {
  imlab::ExperimentConfig config = imlab::load_config(path);
  if (!output.empty()) config.output_dir = output;
  const imlab::ConvergenceReport r = sandwich_only ? imlab::run_sandwich_experiment(config)
                                                   : imlab::run_convergence_experiment(config);
  imlab::write_report(r, config.output_dir);
  print_summary(r);
  return r.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant metric laboratory"};
  app.require_subcommand(1);

  std::string config_path, output;
  CLI::App* run = app.add_subcommand("run", "Run a convergence experiment");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Output directory (overrides the config)");

  CLI::App* sandwich = app.add_subcommand("sandwich", "Build and evaluate a sandwich certificate");
  sandwich->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sandwich->add_option("-o,--output", output, "Output directory (overrides the config)");

  std::string polygon_path;
  std::vector<double> pair_values;
  std::string system_code = "c";
  CLI::App* oracle = app.add_subcommand("oracle", "Conformal pullback values on a polygon");
  oracle->add_option("polygon", polygon_path, "Polygon file (JSON)")->required()->check(CLI::ExistingFile);
  oracle->add_option("--pair", pair_values, "z_re z_im w_re w_im (repeatable)")->required()->expected(4)->take_all();
  oracle->add_option("--system", system_code, "c, l, k or g");

  CLI::App* geom = app.add_subcommand("geom", "Polygon geometry");
  geom->require_subcommand(1);
  std::string a_path, b_path, out_path;
  double eps = 0.0;
  std::vector<double> points;
  CLI::App* env = geom->add_subcommand("envelope", "eps-envelope of a polygon");
  env->add_option("polygon", a_path)->required()->check(CLI::ExistingFile);
  env->add_option("--eps", eps)->required();
  env->add_option("-o,--output", out_path);
  CLI::App* ero = geom->add_subcommand("erode", "Inward eps-offset of a polygon");
  ero->add_option("polygon", a_path)->required()->check(CLI::ExistingFile);
  ero->add_option("--eps", eps)->required();
  ero->add_option("-o,--output", out_path);
  CLI::App* hd = geom->add_subcommand("hausdorff", "Hausdorff distance of two polygon closures");
  hd->add_option("a", a_path)->required()->check(CLI::ExistingFile);
  hd->add_option("b", b_path)->required()->check(CLI::ExistingFile);
  CLI::App* cc = geom->add_subcommand("contained", "Whether closure(A) lies inside B with margin");
  cc->add_option("a", a_path)->required()->check(CLI::ExistingFile);
  cc->add_option("b", b_path)->required()->check(CLI::ExistingFile);
  CLI::App* ct = geom->add_subcommand("contains", "Whether points lie inside a polygon with margin");
  ct->add_option("polygon", a_path)->required()->check(CLI::ExistingFile);
  ct->add_option("--points", points, "x y pairs")->required()->take_all();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_experiment(config_path, output, false);
    if (sandwich->parsed()) return run_experiment(config_path, output, true);
    if (oracle->parsed()) {
      const imlab::PlanarDomain d = imlab::load_polygon(polygon_path);
      const imlab::System sys = imlab::parse_system(system_code);
      json out = json::array();
      for (std::size_t i = 0; i + 3 < pair_values.size(); i += 4) {
        const imlab::Point z(pair_values[i], pair_values[i + 1]);
        const imlab::Point w(pair_values[i + 2], pair_values[i + 3]);
        const imlab::RiemannMap map = imlab::RiemannMap::build(d, z);
        const imlab::MetricEstimate e = imlab::pullback_metric(map, z, w, sys);
        out.push_back({{"z", {z.real(), z.imag()}},
                       {"w", {w.real(), w.imag()}},
                       {"system", system_code},
                       {"lower", e.lower},
                       {"upper", e.upper},
                       {"accuracy", map.accuracy()}});
      }
      emit(out, "");
      return 0;
    }
    if (env->parsed()) {
      emit(imlab::polygon_to_json(imlab::envelope(imlab::load_polygon(a_path), eps)), out_path);
      return 0;
    }
    if (ero->parsed()) {
      const imlab::ErosionResult e = imlab::erode(imlab::load_polygon(a_path), eps);
      if (e.status != imlab::ErosionResult::Status::kConnected) {
        std::fprintf(stderr, "erosion is %s (%d components)\n",
                     e.status == imlab::ErosionResult::Status::kEmpty ? "empty" : "disconnected",
                     e.components);
        return 1;
      }
      emit(imlab::polygon_to_json(*e.domain), out_path);
      return 0;
    }
    if (hd->parsed()) {
      const imlab::HausdorffResult h =
          imlab::hausdorff(imlab::load_polygon(a_path), imlab::load_polygon(b_path));
      emit({{"distance", h.distance},
            {"directed_a_to_b", h.directed_a_to_b},
            {"directed_b_to_a", h.directed_b_to_a},
            {"error_bound", h.error_bound}},
           "");
      return 0;
    }
    if (cc->parsed()) {
      const imlab::ContainmentResult c =
          imlab::compactly_contained(imlab::load_polygon(a_path), imlab::load_polygon(b_path));
      emit({{"contained", c.contained},
            {"margin", c.margin},
            {"witness", {c.witness.real(), c.witness.imag()}}},
           "");
      return c.contained ? 0 : 1;
    }
    if (ct->parsed()) {
      if (points.size() % 2 != 0) throw imlab::ConfigError("--points needs x y pairs");
      std::vector<imlab::Point> k;
      for (std::size_t i = 0; i < points.size(); i += 2) k.emplace_back(points[i], points[i + 1]);
      const bool inside = imlab::contains_compact(imlab::load_polygon(a_path), k);
      emit({{"contains", inside}}, "");
      return inside ? 0 : 1;
    }
  } catch (const imlab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
