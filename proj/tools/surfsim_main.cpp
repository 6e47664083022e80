#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "surfsim/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface-code error-correction simulator (tensor-network engine)"};
  app.require_subcommand(1);

  // run: execute a Monte Carlo sweep from a JSON config file.
  std::string run_config;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  std::string run_engine, run_out;
  int run_chi = 0, run_samples = 0, run_threads = -1;
  auto* run = app.add_subcommand("run", "run EC trials from a JSON config");
  run->add_option("config", run_config, "config file path")->required();
  run->add_option("--seed", run_seed, "master seed override")
      ->each([&](const std::string&) { run_seed_set = true; });
  run->add_option("--engine", run_engine, "exact | boundary_mps");
  run->add_option("--chi", run_chi, "boundary-MPS bond cap");
  run->add_option("--samples", run_samples, "samples per sweep point");
  run->add_option("--threads", run_threads, "worker threads (0 = all cores)");
  run->add_option("--out", run_out, "output CSV path");

  // threshold: estimate the crossing from one or more result CSVs.
  std::vector<std::string> threshold_csvs;
  auto* thr = app.add_subcommand("threshold", "estimate threshold from result CSVs");
  thr->add_option("csv", threshold_csvs, "input CSV files")->required()->expected(-1);

  // layout: dump code geometry as JSON.
  int lay_w = 0, lay_l = 0;
  auto* lay = app.add_subcommand("layout", "dump code geometry as JSON");
  lay->add_option("W", lay_w, "lattice rows")->required();
  lay->add_option("L", lay_l, "lattice columns")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      surfsim::ExperimentConfig cfg =
          surfsim::ExperimentConfig::from_json_text(read_file(run_config));
      if (run_seed_set) cfg.seed = run_seed;
      if (!run_engine.empty())
        cfg.engine = run_engine == "boundary_mps" ? surfsim::Engine::BoundaryMps
                                                  : surfsim::Engine::Exact;
      if (run_chi > 0) cfg.chi = run_chi;
      if (run_samples > 0) cfg.samples = run_samples;
      if (run_threads >= 0) cfg.threads = run_threads;
      if (!run_out.empty()) cfg.out_path = run_out;

      const auto summaries = surfsim::run_experiment(cfg);
      nlohmann::json out;
      out["run_id"] = cfg.run_id.empty() ? cfg.derived_run_id() : cfg.run_id;
      auto pts = nlohmann::json::array();
      for (const auto& s : summaries)
        pts.push_back({{"param", s.param},
                       {"samples", s.samples},
                       {"mean_errdiamond", s.mean_diamond},
                       {"stderr_errdiamond", s.stderr_diamond}});
      out["points"] = std::move(pts);
      std::cout << out.dump(2) << std::endl;
    } else if (thr->parsed()) {
      const auto curves = surfsim::curves_from_csv_files(threshold_csvs);
      const auto est = surfsim::estimate_threshold(curves);
      nlohmann::json out;
      out["found"] = est.found;
      if (est.found) {
        out["threshold"] = est.value;
        out["uncertainty"] = est.uncertainty;
        out["pair_crossings"] = est.pair_crossings;
      } else {
        out["message"] = est.message;
        if (!est.message.empty() && est.message.find("range") != std::string::npos)
          out["bound"] = est.value;
      }
      std::cout << out.dump(2) << std::endl;
    } else if (lay->parsed()) {
      const auto layout = surfsim::CodeLayout::build(lay_w, lay_l);
      std::cout << layout.to_json() << std::endl;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
