#pragma once

// Test-only Pauli-frame stabilizer machinery: samples syndromes of i.i.d.
// Pauli noise by GF(2) arithmetic alone, and enumerates exact syndrome /
// logical-class tables for small codes. Entirely independent of the
// tensor-network pipeline.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "surfsim/channel.hpp"
#include "surfsim/ec.hpp"
#include "surfsim/layout.hpp"
#include "surfsim/pauli.hpp"

namespace surfsim::testsupport {

class PauliFrameSim {
 public:
  PauliFrameSim(const CodeLayout& layout, const Channel& channel)
      : layout_(&layout), probs_(channel.pauli_probs()) {
    cum_[0] = probs_[0];
    for (int k = 1; k < 4; ++k) cum_[static_cast<std::size_t>(k)] =
        cum_[static_cast<std::size_t>(k - 1)] + probs_[static_cast<std::size_t>(k)];
  }

  PauliString sample_error(RngStream& rng) const {
    PauliString e(layout_->n_qubits());
    for (int q = 0; q < layout_->n_qubits(); ++q) {
      const double u = rng.uniform() * cum_[3];
      int op = 3;
      for (int k = 0; k < 4; ++k)
        if (u < cum_[static_cast<std::size_t>(k)]) {
          op = k;
          break;
        }
      if (op == 1 || op == 2) e.set_x(q);
      if (op == 2 || op == 3) e.set_z(q);
    }
    return e;
  }

  Syndrome sample_syndrome(RngStream& rng) const {
    return layout_->syndrome_of(sample_error(rng));
  }

  // Logical class of the residual T_s * error: 0..3 = I, X, Y, Z.
  int logical_class(const PauliString& error) const {
    PauliString residual = layout_->recovery_pauli(layout_->syndrome_of(error));
    residual.mul(error);
    const bool lx = !residual.commutes_with(layout_->logical_z());
    const bool lz = !residual.commutes_with(layout_->logical_x());
    return lx ? (lz ? 2 : 1) : (lz ? 3 : 0);
  }

  struct ClassTable {
    double prob = 0.0;
    std::array<double, 4> cls{};  // joint probabilities by residual class
  };

  // Exact enumeration over all 4^N errors (small codes only).
  std::map<std::string, ClassTable> enumerate() const {
    const int n = layout_->n_qubits();
    std::map<std::string, ClassTable> table;
    std::vector<int> ops(static_cast<std::size_t>(n), 0);
    while (true) {
      PauliString e(n);
      double p = 1.0;
      for (int q = 0; q < n; ++q) {
        const int op = ops[static_cast<std::size_t>(q)];
        p *= probs_[static_cast<std::size_t>(op)];
        if (op == 1 || op == 2) e.set_x(q);
        if (op == 2 || op == 3) e.set_z(q);
      }
      if (p > 0.0) {
        const Syndrome s = layout_->syndrome_of(e);
        ClassTable& t = table[s.to_hex()];
        t.prob += p;
        t.cls[static_cast<std::size_t>(logical_class(e))] += p;
      }
      int q = 0;
      while (q < n && ++ops[static_cast<std::size_t>(q)] == 4) {
        ops[static_cast<std::size_t>(q)] = 0;
        ++q;
      }
      if (q == n) break;
    }
    return table;
  }

  // Process matrix of a Pauli channel with the given class probabilities
  // (normalized), in the Bell convention.
  static Eigen::Matrix4d pauli_process_matrix(const std::array<double, 4>& cls) {
    double sum = cls[0] + cls[1] + cls[2] + cls[3];
    Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
    const double q[4] = {cls[0] / sum, cls[1] / sum, cls[2] / sum, cls[3] / sum};
    // diag(C) for unitary I, X, Y, Z channels in the Bell convention.
    const double diag[4][4] = {{1, 1, -1, 1}, {1, 1, 1, -1}, {1, -1, -1, -1}, {1, -1, 1, 1}};
    for (int cl = 0; cl < 4; ++cl)
      for (int i = 0; i < 4; ++i) c(i, i) += q[cl] * diag[cl][i];
    return c;
  }

 private:
  const CodeLayout* layout_;
  std::array<double, 4> probs_;
  std::array<double, 4> cum_{};
};

}  // namespace surfsim::testsupport
