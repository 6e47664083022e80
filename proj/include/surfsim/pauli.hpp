#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace surfsim {

/// N-qubit Pauli operator stored as X- and Z-part bit vectors (phases are
/// tracked separately where they matter). All syndrome and recovery
/// bookkeeping reduces to GF(2) arithmetic on these.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n_qubits);

  int n() const { return n_; }

  bool x(int q) const { return bit(xw_, q); }
  bool z(int q) const { return bit(zw_, q); }
  void set_x(int q, bool v = true) { set_bit(xw_, q, v); }
  void set_z(int q, bool v = true) { set_bit(zw_, q, v); }

  /// Multiply by another Pauli (phases ignored): XOR of both parts.
  void mul(const PauliString& other);

  bool commutes_with(const PauliString& other) const;
  bool is_identity() const;
  int weight() const;

  /// "IXZY..." rendering, qubit 0 first.
  std::string to_string() const;

  const std::vector<std::uint64_t>& x_words() const { return xw_; }
  const std::vector<std::uint64_t>& z_words() const { return zw_; }

  bool operator==(const PauliString& other) const = default;

 private:
  static bool bit(const std::vector<std::uint64_t>& w, int q);
  static void set_bit(std::vector<std::uint64_t>& w, int q, bool v);

  int n_ = 0;
  std::vector<std::uint64_t> xw_, zw_;
};

/// Rank of a set of GF(2) row vectors (each row a vector of 64-bit words).
int gf2_rank(std::vector<std::vector<std::uint64_t>> rows);

}  // namespace surfsim
