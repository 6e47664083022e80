#pragma once

// Test-only brute-force contraction of the pure-state network into a full
// statevector, independent of the column-sweep engines.

#include <Eigen/Dense>

#include "surfsim/contraction.hpp"
#include "surfsim/peps.hpp"

namespace surfsim::testsupport {

// Statevector over (data qubits + ancilla); bit q of the basis index is
// qubit q (column-major site id), ancilla is the top bit.
inline Eigen::VectorXcd dense_statevector(const PureNetwork& net,
                                          const CodeLayout& layout) {
  const int w = net.width(), l = net.length();
  const int n = w * l;
  auto phys_key = [](int q) { return -10000 - q; };

  KeyedTensor acc;
  acc.t = Tensor::scalar(1.0);
  for (int c = 0; c < l; ++c) {
    for (int r = 0; r < w; ++r) {
      const PureSite& s = net.site(r, c);
      KeyedTensor site;
      site.t = s.t;
      site.keys.push_back(phys_key(layout.qubit(r, c)));
      for (int b : s.virt) site.keys.push_back(b);
      acc = contract_keyed(acc, site);
    }
  }

  // Order legs as [ancilla, qubit n-1, ..., qubit 0] so the flat row-major
  // data is the statevector with ancilla as the top bit.
  std::vector<int> perm;
  auto find_key = [&](int key) {
    for (std::size_t i = 0; i < acc.keys.size(); ++i)
      if (acc.keys[i] == key) return static_cast<int>(i);
    throw std::logic_error("dense_statevector: missing leg");
  };
  perm.push_back(find_key(kAncillaKet));
  for (int q = n - 1; q >= 0; --q) perm.push_back(find_key(phys_key(q)));
  const Tensor full = permute(acc.t, std::span<const int>(perm.data(), perm.size()));

  Eigen::VectorXcd psi(full.size());
  for (std::int64_t i = 0; i < full.size(); ++i) psi(i) = full[i];
  return psi;
}

}  // namespace surfsim::testsupport
