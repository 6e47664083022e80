#pragma once

#include <string>
#include <vector>

#include "surfsim/pauli.hpp"

namespace surfsim {

enum class CheckKind { X, Z };

/// One stabilizer check. `qubits` lists the participating lattice sites in
/// the tensor-chain path order used by the network builder: for plaquettes
/// this is top-left, bottom-left, bottom-right, top-right, so that exactly
/// one chain bond crosses between the two columns of the face.
struct Check {
  CheckKind kind;
  std::vector<int> qubits;  // lattice site ids, path order
  int face_r;               // face coordinates; -1 / W-1 (or -1 / L-1) mark
  int face_c;               //   boundary half-faces outside the lattice
  int strip;                // leftmost column touched; sampling is ordered by strip
};

/// Check measurement outcomes in sampling order, each +1 or -1.
struct Syndrome {
  std::vector<int> outcomes;

  int flips() const {
    int f = 0;
    for (int m : outcomes)
      if (m < 0) ++f;
    return f;
  }
  bool trivial() const { return flips() == 0; }
  /// Hex rendering of the flip pattern (bit k = check k flipped).
  std::string to_hex() const;
};

/// Surface-code geometry on a W x L qubit grid: checkerboard four-qubit
/// checks plus two-qubit boundary checks, one encoded qubit, logical X
/// along the bottom row and logical Z along the left column.
///
/// Construction self-verifies commutation, check count/independence and
/// logical-operator algebra, and throws if any invariant fails.
class CodeLayout {
 public:
  static CodeLayout build(int w, int l);

  int width() const { return w_; }    // rows
  int length() const { return l_; }   // columns
  int n_qubits() const { return w_ * l_; }
  int qubit(int r, int c) const { return c * w_ + r; }
  int row_of(int q) const { return q % w_; }
  int col_of(int q) const { return q / w_; }

  const std::vector<Check>& checks() const { return checks_; }
  const PauliString& logical_x() const { return logical_x_; }
  const PauliString& logical_z() const { return logical_z_; }

  PauliString check_pauli(const Check& ch) const;

  /// Syndrome of a given Pauli error (perfect measurements).
  Syndrome syndrome_of(const PauliString& error) const;

  /// Return-to-codespace Pauli T_s: X-strings from flipped Z-checks to the
  /// left boundary, Z-strings from flipped X-checks to the top boundary.
  /// Verified to anticommute with exactly the flipped checks.
  PauliString recovery_pauli(const Syndrome& s) const;

  /// Geometry dump (qubit coordinates, checks, logicals) as a JSON string.
  std::string to_json() const;

 private:
  CodeLayout() = default;
  void verify() const;

  int w_ = 0, l_ = 0;
  std::vector<Check> checks_;
  PauliString logical_x_, logical_z_;
};

}  // namespace surfsim
