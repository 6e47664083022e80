#include "surfsim/peps.hpp"

#include <algorithm>
#include <stdexcept>

namespace surfsim {

namespace {

// Contract op (legs [i_new, j, new...]) onto leg 0 of t and restore the
// convention [leg0', rest..., new legs last].
Tensor apply_to_leg0(const Tensor& op, const Tensor& t) {
  Tensor r = contract(op, t, {{1, 0}});
  // r legs: [i_new, new..., rest...] -> [i_new, rest..., new...]
  const int n_new = op.rank() - 2;
  const int rest = t.rank() - 1;
  std::vector<int> perm;
  perm.reserve(static_cast<std::size_t>(r.rank()));
  perm.push_back(0);
  for (int k = 0; k < rest; ++k) perm.push_back(1 + n_new + k);
  for (int k = 0; k < n_new; ++k) perm.push_back(1 + k);
  return permute(r, std::span<const int>(perm.data(), perm.size()));
}

}  // namespace

Tensor w_tensor(const Eigen::Matrix2cd& c, int n_virtual) {
  if (n_virtual < 1) throw std::invalid_argument("w_tensor: n_virtual must be >= 1");
  std::vector<int> shape(static_cast<std::size_t>(2 + n_virtual), 2);
  Tensor t(shape);
  std::vector<int> idx(static_cast<std::size_t>(2 + n_virtual), 0);
  for (int i = 0; i < 2; ++i) {
    for (int ip = 0; ip < 2; ++ip) {
      idx[0] = i;
      idx[1] = ip;
      std::fill(idx.begin() + 2, idx.end(), 0);
      t.at(std::span<const int>(idx.data(), idx.size())) = (i == ip) ? 1.0 : 0.0;
      std::fill(idx.begin() + 2, idx.end(), 1);
      t.at(std::span<const int>(idx.data(), idx.size())) = c(i, ip);
    }
  }
  return t;
}

std::vector<Tensor> check_projector_network(const Check& check, int sign) {
  const Eigen::Matrix2cd base =
      (check.kind == CheckKind::X) ? pauli_matrix(1) : pauli_matrix(3);
  const int k = static_cast<int>(check.qubits.size());
  std::vector<Tensor> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) {
    const int nv = (m == 0 || m == k - 1) ? 1 : 2;
    const Eigen::Matrix2cd c = (m == 0 && sign < 0) ? (-base).eval() : base;
    out.push_back(w_tensor(c, nv));
  }
  return out;
}

void PureNetwork::apply_chain(const std::vector<int>& path_qubits,
                              const Eigen::Matrix2cd& c_first,
                              const Eigen::Matrix2cd& c_rest, bool trailing_ancilla,
                              const CodeLayout& layout) {
  const int k = static_cast<int>(path_qubits.size());
  // Bonds along consecutive path edges.
  std::vector<int> chain_bonds;
  for (int m = 0; m + 1 < k; ++m) {
    const int qa = path_qubits[static_cast<std::size_t>(m)];
    const int qb = path_qubits[static_cast<std::size_t>(m + 1)];
    int r1 = layout.row_of(qa), c1 = layout.col_of(qa);
    int r2 = layout.row_of(qb), c2 = layout.col_of(qb);
    if (r2 < r1 || (r2 == r1 && c2 < c1)) {
      std::swap(r1, r2);
      std::swap(c1, c2);
    }
    if (!((r1 == r2 && c2 == c1 + 1) || (c1 == c2 && r2 == r1 + 1)))
      throw std::logic_error("apply_chain: path edge is not axis aligned");
    bonds_.push_back(Bond{r1, c1, r2, c2, 2});
    chain_bonds.push_back(static_cast<int>(bonds_.size()) - 1);
  }

  for (int m = 0; m < k; ++m) {
    const int q = path_qubits[static_cast<std::size_t>(m)];
    std::vector<int> new_ids;
    if (m > 0) new_ids.push_back(chain_bonds[static_cast<std::size_t>(m - 1)]);
    if (m + 1 < k) new_ids.push_back(chain_bonds[static_cast<std::size_t>(m)]);
    if (m == k - 1 && trailing_ancilla) new_ids.push_back(kAncillaKet);
    const Eigen::Matrix2cd& c = (m == 0) ? c_first : c_rest;
    const Tensor w = w_tensor(c, static_cast<int>(new_ids.size()));
    PureSite& s = sites_[static_cast<std::size_t>(q)];
    s.t = apply_to_leg0(w, s.t);
    s.virt.insert(s.virt.end(), new_ids.begin(), new_ids.end());
  }
}

PureNetwork PureNetwork::build_bell(const CodeLayout& layout) {
  PureNetwork net;
  net.w_ = layout.width();
  net.l_ = layout.length();
  net.sites_.resize(static_cast<std::size_t>(net.w_ * net.l_));
  for (auto& s : net.sites_) {
    s.t = Tensor({2});
    s.t.at({0}) = 1.0;  // |0>
  }

  const Eigen::Matrix2cd x = pauli_matrix(1);
  for (const auto& ch : layout.checks()) {
    if (ch.kind != CheckKind::X) continue;
    net.apply_chain(ch.qubits, x, x, false, layout);
  }

  // Ancilla-coupled chain along the bottom row: identity at ancilla 0,
  // X on every bottom-row qubit at ancilla 1.
  std::vector<int> bottom;
  for (int c = 0; c < net.l_; ++c) bottom.push_back(layout.qubit(net.w_ - 1, c));
  net.apply_chain(bottom, x, x, true, layout);

  return net;
}

int DensityNetwork::new_bond(int r1, int c1, int r2, int c2) {
  bonds_.push_back(Bond{r1, c1, r2, c2, 2});
  return static_cast<int>(bonds_.size()) - 1;
}

DensityNetwork DensityNetwork::build_bell(const CodeLayout& layout) {
  const PureNetwork pure = PureNetwork::build_bell(layout);

  DensityNetwork net;
  net.w_ = pure.w_;
  net.l_ = pure.l_;
  net.sites_.resize(pure.sites_.size());
  net.versions_.assign(pure.sites_.size(), 0);

  // Doubled bonds: ket copy then bra copy of each pure bond.
  const int nb = static_cast<int>(pure.bonds_.size());
  net.bonds_.reserve(static_cast<std::size_t>(2 * nb));
  for (const auto& b : pure.bonds_) net.bonds_.push_back(b);              // ket: same id
  for (const auto& b : pure.bonds_) net.bonds_.push_back(b);              // bra: id + nb
  auto bra_id = [nb](int ket) { return ket + nb; };

  for (std::size_t s = 0; s < pure.sites_.size(); ++s) {
    const PureSite& a = pure.sites_[s];
    const int nv = static_cast<int>(a.virt.size());
    Tensor b = contract(a.t, a.t.conjugate(), {});
    // legs: [PK, kv..., PB, bv...] -> [PK, PB, (AK, AB), kv', bv'] with the
    // ancilla sentinels pulled out of the virtual lists.
    int anc_pos = -1;
    for (int k = 0; k < nv; ++k)
      if (a.virt[static_cast<std::size_t>(k)] == kAncillaKet) anc_pos = k;

    std::vector<int> perm;
    perm.push_back(0);
    perm.push_back(1 + nv);
    if (anc_pos >= 0) {
      perm.push_back(1 + anc_pos);
      perm.push_back(2 + nv + anc_pos);
    }
    std::vector<int> virt;
    for (int k = 0; k < nv; ++k) {
      if (k == anc_pos) continue;
      perm.push_back(1 + k);
      virt.push_back(a.virt[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < nv; ++k) {
      if (k == anc_pos) continue;
      perm.push_back(2 + nv + k);
      virt.push_back(bra_id(a.virt[static_cast<std::size_t>(k)]));
    }

    SiteTensor& st = net.sites_[s];
    st.t = permute(b, std::span<const int>(perm.data(), perm.size()));
    st.virt = std::move(virt);
    st.has_ancilla = (anc_pos >= 0);
  }
  return net;
}

int DensityNetwork::max_virtual_legs() const {
  int m = 0;
  for (const auto& s : sites_) m = std::max(m, static_cast<int>(s.virt.size()));
  return m;
}

std::int64_t DensityNetwork::cut_dimension(int c) const {
  std::int64_t d = 1;
  for (const auto& b : bonds_)
    if (b.horizontal() && b.c1 == c) d *= b.dim;
  return d;
}

void DensityNetwork::apply_site_superop(int r, int c, const Tensor& e) {
  SiteTensor& s = sites_[idx(r, c)];
  // e legs (i, j, j', i'); site legs [PK, PB, rest...].
  Tensor t = contract(e, s.t, {{1, 0}, {2, 1}});
  // result: [i, i', rest...] which is already the site convention.
  s.t = std::move(t);
  bump(r, c);
}

void DensityNetwork::apply_noise(const Channel& channel) {
  for (int c = 0; c < l_; ++c)
    for (int r = 0; r < w_; ++r) apply_site_superop(r, c, channel.superoperator());
}

void DensityNetwork::apply_ket_op(int r, int c, const Eigen::Matrix2cd& m) {
  SiteTensor& s = sites_[idx(r, c)];
  Tensor op({2, 2});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) op.at({i, j}) = m(i, j);
  s.t = apply_to_leg0(op, s.t);
  bump(r, c);
}

void DensityNetwork::apply_check_chain(const CodeLayout& layout, int check_index,
                                       int sign) {
  const Check& ch = layout.checks()[static_cast<std::size_t>(check_index)];
  const std::vector<Tensor> chain = check_projector_network(ch, sign);
  const int k = static_cast<int>(ch.qubits.size());

  std::vector<int> chain_bonds;
  for (int m = 0; m + 1 < k; ++m) {
    const int qa = ch.qubits[static_cast<std::size_t>(m)];
    const int qb = ch.qubits[static_cast<std::size_t>(m + 1)];
    int r1 = layout.row_of(qa), c1 = layout.col_of(qa);
    int r2 = layout.row_of(qb), c2 = layout.col_of(qb);
    if (r2 < r1 || (r2 == r1 && c2 < c1)) {
      std::swap(r1, r2);
      std::swap(c1, c2);
    }
    chain_bonds.push_back(new_bond(r1, c1, r2, c2));
  }

  for (int m = 0; m < k; ++m) {
    const int q = ch.qubits[static_cast<std::size_t>(m)];
    std::vector<int> new_ids;
    if (m > 0) new_ids.push_back(chain_bonds[static_cast<std::size_t>(m - 1)]);
    if (m + 1 < k) new_ids.push_back(chain_bonds[static_cast<std::size_t>(m)]);
    SiteTensor& s = sites_[static_cast<std::size_t>(q)];
    s.t = apply_to_leg0(chain[static_cast<std::size_t>(m)], s.t);
    s.virt.insert(s.virt.end(), new_ids.begin(), new_ids.end());
    bump(layout.row_of(q), layout.col_of(q));
  }
  applied_.emplace_back(check_index, sign);
}

}  // namespace surfsim
