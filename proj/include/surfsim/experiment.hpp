#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "surfsim/ec.hpp"

namespace surfsim {

inline constexpr const char* kVersion = "1.0.0";

/// Channel selection as it appears in config files: kind + parameter +
/// approximation tag (exact | pta | hpa).
struct ChannelSpec {
  std::string kind;    // amplitude_damping | systematic_rotation | depolarizing
  double param = 0.0;
  std::string approx = "exact";
};

Channel make_channel(const ChannelSpec& spec);

struct ExperimentConfig {
  int w = 3, l = 3;
  std::string channel_kind = "depolarizing";
  std::vector<double> params;
  std::string approx = "exact";
  Engine engine = Engine::Exact;
  int chi = 8;
  double svd_floor = 1e-14;
  int samples = 1000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::string out_path;
  std::string run_id;  // derived from config + seed when empty

  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
  std::string derived_run_id() const;
};

struct TrialRecord {
  double param = 0.0;
  int trial = 0;
  std::string syndrome_hex;
  int correction = 0;
  double err2 = 0.0;
  double errdiamond = 0.0;
  double ms = 0.0;
};

struct PointSummary {
  double param = 0.0;
  int samples = 0;
  double mean_diamond = 0.0;
  double stderr_diamond = 0.0;
  double mean_err2 = 0.0;
};

/// Deterministic per-trial seed derived from the master seed, sweep point
/// and trial index (scheduler independent).
std::uint64_t derive_trial_seed(std::uint64_t master, int point_index, int trial);

/// Run `samples` independent EC rounds at one sweep point over a worker
/// pool. Records land in trial order regardless of scheduling.
PointSummary run_point(const CodeLayout& layout, const Channel& channel,
                       const ContractionConfig& cfg, int samples,
                       std::uint64_t master_seed, int point_index, int threads,
                       std::vector<TrialRecord>* records);

/// Syndrome-only sampling at one point (no process matrices, no decoding).
std::vector<Syndrome> sample_point_syndromes(const CodeLayout& layout,
                                             const Channel& channel,
                                             const ContractionConfig& cfg, int samples,
                                             std::uint64_t master_seed, int point_index,
                                             int threads);

/// CSV header: run_id,W,L,channel,param,approx,engine,chi,trial,
/// syndrome_hex,correction,err2,errdiamond,ms
void write_csv_header(std::ostream& os);
void write_csv_record(std::ostream& os, const ExperimentConfig& cfg,
                      const TrialRecord& rec);

/// Execute the whole sweep, streaming records to the CSV path (when set)
/// and writing a JSON run manifest next to it.
std::vector<PointSummary> run_experiment(const ExperimentConfig& cfg);

struct CurvePoint {
  double param = 0.0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct SizeCurve {
  int w = 0, l = 0;
  std::vector<CurvePoint> points;  // ascending param order
  int distance() const { return w < l ? w : l; }
};

struct ThresholdEstimate {
  bool found = false;
  double value = 0.0;
  double uncertainty = 0.0;
  std::string message;                // set for bounds / no-clear-transition
  std::vector<double> pair_crossings; // one entry per size pair with a crossing
};

/// Pairwise curve-crossing threshold estimate over linear interpolants.
/// Needs at least two sizes with three sweep points each; reports a bound
/// when every pair stays on one side and "no clear transition" when the
/// pairwise crossings disagree.
ThresholdEstimate estimate_threshold(const std::vector<SizeCurve>& curves);

/// Group CSV rows (from files produced by run_experiment) into size curves
/// of mean diamond error per (W, L, param).
std::vector<SizeCurve> curves_from_csv_files(const std::vector<std::string>& paths);

}  // namespace surfsim
