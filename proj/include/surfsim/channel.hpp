#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "surfsim/tensor.hpp"

namespace surfsim {

/// Pauli basis {I, X, Y, Z}; index 0 is the identity throughout.
const Eigen::Matrix2cd& pauli_matrix(int i);

/// Single-qubit CPTP map held in Kraus form, with cached superoperator and
/// chi-matrix representations. Immutable after construction.
class Channel {
 public:
  static Channel amplitude_damping(double gamma);
  static Channel systematic_rotation(double theta);
  static Channel depolarizing(double epsilon);
  static Channel from_kraus(std::vector<Eigen::Matrix2cd> kraus, std::string name);
  /// Pauli channel with probabilities (p_I, p_X, p_Y, p_Z).
  static Channel from_pauli_probs(const std::array<double, 4>& p, std::string name);
  static Channel identity();

  const std::vector<Eigen::Matrix2cd>& kraus() const { return kraus_; }
  const std::string& name() const { return name_; }

  /// 4-index superoperator E_{i j j' i'} = <i| E(|j><j'|) |i'>, every index
  /// of dimension 2, ordered (i, j, j', i').
  const Tensor& superoperator() const { return superop_; }

  /// chi matrix of E(rho) = sum_{ij} chi_ij P_i rho P_j.
  const Eigen::Matrix4cd& chi_matrix() const { return chi_; }

  /// Apply to a 2x2 density matrix.
  Eigen::Matrix2cd apply(const Eigen::Matrix2cd& rho) const;

  /// True when every Kraus operator is diagonal in the Z basis, i.e. the
  /// channel commutes with Z-check conjugation.
  bool commutes_with_z() const;

  bool is_pauli(double tol = 1e-10) const;
  /// Pauli flip probabilities (valid when is_pauli()).
  std::array<double, 4> pauli_probs() const;

  /// Pauli twirl: keep the chi-matrix diagonal.
  Channel pauli_twirl() const;

  /// Closest Pauli channel (process-matrix 2-norm) that is at least as
  /// noisy as this channel on every sampled pure input, noise measured by
  /// the trace distance between input and output. Constraints are enforced
  /// on a fixed sample of 200 quasi-uniform Bloch points plus the six
  /// cardinal states.
  Channel honest_pauli_approx() const;

 private:
  Channel() = default;
  void finalize();

  std::vector<Eigen::Matrix2cd> kraus_;
  Tensor superop_;
  Eigen::Matrix4cd chi_;
  std::string name_;
};

/// Process matrix C_ij = Tr[(P_i (x) P_j) (E (x) I)(|Phi+><Phi+|)] with
/// |Phi+> = (|00> + |11>)/sqrt(2); identity channel gives diag(1, 1, -1, 1).
Eigen::Matrix4d channel_process_matrix(const Channel& c);

/// Superoperator of the composition b after a, as the 4-index tensor.
Tensor compose_superoperators(const Tensor& b_after, const Tensor& a_first);

/// The fixed Bloch-sphere input sample used by the honest approximation:
/// 200 golden-spiral points plus the six cardinal directions (version 1,
/// frozen for reproducibility).
const std::vector<Eigen::Vector3d>& hpa_bloch_sample();

}  // namespace surfsim
