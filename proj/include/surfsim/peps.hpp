#pragma once

#include <Eigen/Dense>

#include <vector>

#include "surfsim/channel.hpp"
#include "surfsim/layout.hpp"
#include "surfsim/tensor.hpp"

namespace surfsim {

/// Sentinel leg keys for the two free ancilla indices; real bonds use
/// non-negative ids.
constexpr int kAncillaKet = -1;
constexpr int kAncillaBra = -2;

/// Virtual bond between two lattice sites. Bonds are always axis aligned:
/// (r2, c2) is either the right or the down neighbor of (r1, c1).
struct Bond {
  int r1, c1, r2, c2;
  int dim;
  bool horizontal() const { return c2 == c1 + 1; }
};

/// W(C) tensor of the check-projector construction: two physical indices
/// and n_virtual virtual indices, all of dimension 2; identity block at
/// all-virtual-0 and C at all-virtual-1. Index order (i, i', a1..an).
Tensor w_tensor(const Eigen::Matrix2cd& c, int n_virtual);

/// Per-qubit chain tensors whose contraction over the shared virtual bonds
/// equals I + sign * (check operator) on the check's qubits, in the
/// check's path order. The sign is carried by the first tensor.
std::vector<Tensor> check_projector_network(const Check& check, int sign);

/// One site of the pure-state network: legs [phys] + virtual legs. The
/// ancilla index of the bottom-right site appears in `virt` as the
/// kAncillaKet sentinel.
struct PureSite {
  Tensor t;
  std::vector<int> virt;
};

/// Tensor network for the half-encoded Bell state (Eq. of the logical-zero
/// projected product state plus the ancilla-coupled chain on the bottom
/// row). Used for construction and for dense verification in tests.
class PureNetwork {
 public:
  static PureNetwork build_bell(const CodeLayout& layout);

  int width() const { return w_; }
  int length() const { return l_; }
  const PureSite& site(int r, int c) const { return sites_[idx(r, c)]; }
  const std::vector<Bond>& bonds() const { return bonds_; }

 private:
  friend class DensityNetwork;
  std::size_t idx(int r, int c) const { return static_cast<std::size_t>(c * w_ + r); }
  void apply_chain(const std::vector<int>& path_qubits, const Eigen::Matrix2cd& c_first,
                   const Eigen::Matrix2cd& c_rest, bool trailing_ancilla,
                   const CodeLayout& layout);

  int w_ = 0, l_ = 0;
  std::vector<PureSite> sites_;
  std::vector<Bond> bonds_;
};

/// One doubled site: legs [phys_ket, phys_bra] (+ [anc_ket, anc_bra] on the
/// ancilla site) followed by virtual legs listed in `virt`.
struct SiteTensor {
  Tensor t;
  std::vector<int> virt;
  bool has_ancilla = false;
  int phys_legs() const { return has_ancilla ? 4 : 2; }
};

/// Grid of doubled tensors representing the (unnormalized) density operator
/// of |Psi+> = |0>_L|0>_a + |1>_L|1>_a, with two free ancilla indices on
/// the bottom-right site. Check projectors applied during syndrome
/// sampling act on the ket side only; one projector layer is always
/// absorbed into the other by trace cyclicity.
class DensityNetwork {
 public:
  static DensityNetwork build_bell(const CodeLayout& layout);

  int width() const { return w_; }
  int length() const { return l_; }
  const SiteTensor& site(int r, int c) const { return sites_[idx(r, c)]; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const std::vector<std::pair<int, int>>& applied_checks() const { return applied_; }

  /// Largest virtual-leg count of any site in the initial network.
  int max_virtual_legs() const;

  /// Merged bond dimension crossing the cut between columns c and c+1.
  std::int64_t cut_dimension(int c) const;

  /// Apply a single-qubit channel to every data qubit (ancilla untouched).
  void apply_noise(const Channel& channel);

  /// Contract a 4-index superoperator E_{i j j' i'} into one site.
  void apply_site_superop(int r, int c, const Tensor& e);

  /// Multiply a 2x2 operator onto the top of the ket side of one site.
  void apply_ket_op(int r, int c, const Eigen::Matrix2cd& m);

  /// Apply the chain for I + sign * check to the ket side (checks are
  /// recorded in application order). `check_index` is the position in the
  /// layout's check list.
  void apply_check_chain(const CodeLayout& layout, int check_index, int sign);

  /// Version counter for a site, bumped on every mutation (used by traced-
  /// tensor caches).
  std::uint64_t site_version(int r, int c) const { return versions_[idx(r, c)]; }

 private:
  std::size_t idx(int r, int c) const { return static_cast<std::size_t>(c * w_ + r); }
  int new_bond(int r1, int c1, int r2, int c2);
  void bump(int r, int c) { ++versions_[idx(r, c)]; }

  int w_ = 0, l_ = 0;
  std::vector<SiteTensor> sites_;
  std::vector<Bond> bonds_;
  std::vector<std::uint64_t> versions_;
  std::vector<std::pair<int, int>> applied_;
};

}  // namespace surfsim
