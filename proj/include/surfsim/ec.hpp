#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

#include "surfsim/channel.hpp"
#include "surfsim/contraction.hpp"
#include "surfsim/layout.hpp"
#include "surfsim/oracle.hpp"
#include "surfsim/peps.hpp"

namespace surfsim {

/// splitmix64 stream; deterministic across platforms, one per trial.
struct RngStream {
  std::uint64_t state;
  explicit RngStream(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

/// Normalized 4x4 real process matrix (C00 = 1) plus the log of the raw
/// normalization it was divided by.
struct ProcessMatrix {
  Eigen::Matrix4d c = Eigen::Matrix4d::Identity();
  double log_norm = 0.0;
};

struct RoundResult {
  Syndrome syndrome;
  double log_probability = 0.0;  // log of the sampled syndrome's probability
  ProcessMatrix raw;             // R_s after N, before the decoder correction
  int correction = 0;            // 0..3 = I, X, Y, Z
  ProcessMatrix decoded;
  double error_2norm = 0.0;
  double error_diamond = 0.0;
};

/// Process matrix of the identity channel in the Bell convention.
Eigen::Matrix4d identity_process_matrix();

struct SampleOutcome {
  Syndrome syndrome;
  double log_prob = 0.0;
  LogValue norm;  // trace of the projected network
};

/// Measure every check sequentially on a noise-applied network: conditional
/// probabilities come from the configured engine, outcomes are drawn from
/// rng (or forced), and the signed projector chains are applied in place.
SampleOutcome sample_syndrome(DensityNetwork& net, const CodeLayout& layout,
                              const ContractionConfig& cfg, RngStream* rng,
                              const Syndrome* forced = nullptr);

/// Process matrix of the recovery-composed logical channel for a network
/// that already carries noise and the syndrome's projector chains.
ProcessMatrix logical_process_matrix(const DensityNetwork& net, const CodeLayout& layout,
                                     const Syndrome& s, const ContractionConfig& cfg);

/// Compose a logical Pauli correction with a channel: flips the sign of
/// every row whose Pauli anticommutes with the correction.
Eigen::Matrix4d compose_with_logical(const Eigen::Matrix4d& c, int correction);

/// Frobenius distance between process matrices (the decoder metric).
double process_2norm_distance(const Eigen::Matrix4d& a, const Eigen::Matrix4d& b);

/// argmin over {I, X, Y, Z} of the 2-norm distance of the corrected channel
/// from the identity; ties break toward the smaller index.
int decode_correction(const Eigen::Matrix4d& c);

/// Diamond distance of the channel from the identity: the maximum over
/// two-qubit pure inputs of the trace distance between (E (x) I) output and
/// input. Pauli channels take a closed-form path; everything else runs a
/// seeded 32-start Nelder-Mead refinement (tolerance 1e-9).
double diamond_from_identity(const Eigen::Matrix4d& c);

/// Same maximization started from a dense deterministic grid instead of the
/// production multistart schedule; used as the independent cross-check.
double diamond_from_identity_grid(const Eigen::Matrix4d& c, int points_per_axis);

/// One full error-correction round driver for a fixed (layout, channel,
/// engine) triple. Immutable after construction; run_trial is const and
/// thread-safe, so trials parallelize freely.
class EcRunner {
 public:
  EcRunner(const CodeLayout& layout, const Channel& channel, ContractionConfig cfg);

  const CodeLayout& layout() const { return *layout_; }
  const Channel& channel() const { return channel_; }
  bool z_fast_path() const { return fast_z_; }

  RoundResult run_trial(std::uint64_t trial_seed) const;

  /// Run with every outcome forced (probability accumulated for the forced
  /// string); used for oracle comparisons and shared-syndrome tests.
  RoundResult run_forced(const Syndrome& s) const;

  /// Sampling only, no process matrix / decoding.
  Syndrome sample_only(std::uint64_t trial_seed, double* log_probability = nullptr) const;

  /// log Tr(Pi_s N(rho)) - log Tr(N(rho)) computed in one shot from a fresh
  /// network (telescoping cross-check for tests).
  double forced_syndrome_log_probability(const Syndrome& s) const;

 private:
  struct PassResult {
    Syndrome syndrome;
    double log_prob = 0.0;
    LogValue norm;  // Tr of the projected network
  };

  PassResult sample_pass(DensityNetwork& net, RngStream* rng, const Syndrome* forced,
                         bool with_boundaries) const;
  LogValue window_value(const DensityNetwork& net, TracedCache& cache,
                        const Boundary& left, int strip, const Check& ch,
                        const ColumnEngine& engine) const;
  ProcessMatrix process_matrix(const DensityNetwork& net, const Syndrome& s) const;

  const CodeLayout* layout_;
  Channel channel_;
  ContractionConfig cfg_;
  bool fast_z_ = false;
  DensityNetwork template_net_;          // Bell network with noise applied
  std::vector<Boundary> rpool_;          // pristine right environments, ancilla traced
  std::vector<std::vector<int>> strip_checks_;
  LogValue base_norm_;                   // Tr of the noisy network
};

}  // namespace surfsim
