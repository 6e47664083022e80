#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "surfsim/peps.hpp"
#include "surfsim/tensor.hpp"

namespace surfsim {

/// Thrown by the exact engine when a contraction would exceed the
/// configured memory cap; the boundary-MPS engine handles such networks.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Engine { Exact, BoundaryMps };

struct ContractionConfig {
  Engine engine = Engine::Exact;
  int chi = 8;                    // boundary engine only
  double svd_floor = 1e-14;       // absolute singular-value floor
  std::int64_t max_tensor_entries = std::int64_t(1) << 26;  // exact engine cap
};

/// A value tracked as mantissa * exp(log_scale) to survive the growth and
/// decay of unnormalized network contractions.
struct LogValue {
  cplx mantissa{0.0, 0.0};
  double log_scale = 0.0;

  bool is_zero() const { return mantissa == cplx(0.0, 0.0); }
  /// Ratio a/b as a plain double (real part; callers assert imaginary
  /// parts separately where it matters).
  static double real_ratio(const LogValue& a, const LogValue& b);
  double log_abs() const;
};

/// A tensor whose legs carry keys: bond ids or the ancilla sentinels.
struct KeyedTensor {
  Tensor t;
  std::vector<int> keys;
};

/// Contract all identically-keyed leg pairs of a and b. Surviving legs keep
/// (a legs..., b legs...) order. Keys must be unique within each side.
KeyedTensor contract_keyed(const KeyedTensor& a, const KeyedTensor& b);

/// Physical (and optionally ancilla) indices of a doubled site capped by
/// tracing; remaining legs are the virtual legs (plus open ancilla legs
/// first when kept).
KeyedTensor trace_site(const SiteTensor& s, bool keep_ancilla);

/// Boundary of a partially contracted network: either one dense tensor over
/// all open legs (exact engine) or a matrix-product state with one site per
/// lattice row (boundary-MPS engine).
struct Boundary {
  bool mps = false;
  KeyedTensor dense;                       // exact engine
  std::vector<Tensor> sites;               // mps: legs [Dl, phys..., Dr]
  std::vector<std::vector<int>> site_keys; // keys of the phys legs per site
  double log_scale = 0.0;
};

/// Column-sweep contraction over a DensityNetwork. The network reference is
/// only used for bond geometry; per-column site tensors are supplied by the
/// caller so that trial-local modifications never touch shared state.
class ColumnEngine {
 public:
  ColumnEngine(const DensityNetwork& net, ContractionConfig cfg)
      : net_(&net), cfg_(cfg) {}

  const ContractionConfig& config() const { return cfg_; }

  Boundary edge() const;

  /// Absorb one column of traced sites (row 0 .. W-1) into the boundary.
  void absorb(Boundary& b, std::vector<KeyedTensor> column) const;

  /// Contract two boundaries over their shared cut. Returns the remaining
  /// tensor (scalar, or the open ancilla legs ordered [ket, bra]) plus the
  /// combined log scale.
  std::pair<Tensor, double> close(const Boundary& left, const Boundary& right) const;

  LogValue close_scalar(const Boundary& left, const Boundary& right) const;

  /// Total truncation weight discarded so far (boundary engine diagnostics).
  double truncation_weight() const { return truncation_weight_; }

 private:
  void absorb_dense(Boundary& b, std::vector<KeyedTensor>& column) const;
  void absorb_mps(Boundary& b, std::vector<KeyedTensor>& column) const;
  bool bond_vertical(int key) const;

  const DensityNetwork* net_;
  ContractionConfig cfg_;
  mutable double truncation_weight_ = 0.0;
};

/// Traced-site cache for one (trial-local) network, keyed by site version.
class TracedCache {
 public:
  TracedCache(const DensityNetwork& net, bool keep_ancilla);
  const KeyedTensor& get(int r, int c);
  std::vector<KeyedTensor> column(int c);

 private:
  const DensityNetwork* net_;
  bool keep_ancilla_;
  std::vector<KeyedTensor> entries_;
  std::vector<std::uint64_t> stamp_;
  std::vector<bool> valid_;
};

}  // namespace surfsim
