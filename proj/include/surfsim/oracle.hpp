#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "surfsim/channel.hpp"
#include "surfsim/contraction.hpp"
#include "surfsim/layout.hpp"

namespace surfsim {

/// Brute-force density-matrix simulator over (data qubits + 1 ancilla),
/// capped at 12 data qubits. Serves as the independent verification oracle
/// for the tensor-network pipeline; everything here is computed literally
/// from projector products and Pauli expectation values.
class DenseOracle {
 public:
  explicit DenseOracle(const CodeLayout& layout);

  int n_data() const { return n_; }
  std::int64_t dim() const { return std::int64_t(1) << (n_ + 1); }

  /// Unnormalized |Psi+> = |0>_L |0>_a + |1>_L |1>_a; ancilla is the top bit.
  const Eigen::VectorXcd& bell_state() const { return bell_; }

  /// rho for the Bell state with a channel applied to every data qubit.
  Eigen::MatrixXcd noisy_bell_density(const Channel& channel) const;

  struct SyndromeReport {
    Syndrome syndrome;
    double probability = 0.0;     // Born probability of this outcome string
    Eigen::Matrix4d c;            // normalized process matrix, C00 = 1
  };

  /// Probability and process matrix of one fixed syndrome.
  SyndromeReport analyze_syndrome(const Eigen::MatrixXcd& noisy_rho,
                                  const Syndrome& s) const;

  /// Every syndrome of the layout with probability and process matrix.
  /// Probabilities sum to 1.
  std::vector<SyndromeReport> enumerate_round(const Channel& channel) const;

  /// <psi| P |psi> / <psi|psi> for a Pauli string on the data register.
  double pauli_expectation(const Eigen::VectorXcd& psi, const PauliString& p) const;

  /// Apply a single-qubit channel to qubit q of a density matrix over
  /// n_data+1 qubits (q may address the ancilla bit n_data).
  static void apply_channel_site(Eigen::MatrixXcd& rho, const Channel& channel, int q);

 private:
  Eigen::VectorXcd apply_pauli_vec(const Eigen::VectorXcd& v, std::uint64_t xm,
                                   std::uint64_t zm) const;
  void project_check(Eigen::MatrixXcd& rho, const Check& ch, int outcome) const;
  void recurse(Eigen::MatrixXcd rho, std::size_t k, Syndrome& s, double norm0,
               std::vector<SyndromeReport>& out) const;
  Eigen::Matrix4d process_matrix_of(const Eigen::MatrixXcd& projected,
                                    const Syndrome& s) const;

  const CodeLayout* layout_;
  int n_ = 0;
  Eigen::VectorXcd bell_;
};

}  // namespace surfsim
