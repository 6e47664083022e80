#include "surfsim/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace surfsim {

namespace {

std::uint64_t mask_of(const std::vector<std::uint64_t>& words) {
  return words.empty() ? 0 : words[0];
}

// Phase convention P = i^{|x&z|} X^x Z^z, which makes every Pauli string
// Hermitian and matches Y = i X Z per site.
cplx pauli_phase(std::uint64_t xm, std::uint64_t zm) {
  switch (std::popcount(xm & zm) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

int parity(std::uint64_t v) { return std::popcount(v) & 1; }

}  // namespace

DenseOracle::DenseOracle(const CodeLayout& layout) : layout_(&layout) {
  n_ = layout.n_qubits();
  if (n_ > 12)
    throw ResourceError("DenseOracle: capped at 12 data qubits");

  const std::int64_t dn = std::int64_t(1) << n_;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dn);
  v(0) = 1.0;  // |0...0>
  for (const auto& ch : layout.checks()) {
    if (ch.kind != CheckKind::X) continue;
    const PauliString p = layout.check_pauli(ch);
    v = v + apply_pauli_vec(v, mask_of(p.x_words()), 0);
  }
  // v is now |0>_L up to normalization.
  const Eigen::VectorXcd v1 =
      apply_pauli_vec(v, mask_of(layout.logical_x().x_words()), 0);

  bell_ = Eigen::VectorXcd::Zero(dn * 2);
  bell_.segment(0, dn) = v;    // ancilla |0>
  bell_.segment(dn, dn) = v1;  // ancilla |1>
}

Eigen::VectorXcd DenseOracle::apply_pauli_vec(const Eigen::VectorXcd& v, std::uint64_t xm,
                                              std::uint64_t zm) const {
  const std::int64_t d = v.size();
  Eigen::VectorXcd out(d);
  const cplx ph = pauli_phase(xm, zm);
  for (std::int64_t i = 0; i < d; ++i) {
    const cplx amp = ph * (parity(static_cast<std::uint64_t>(i) & zm) ? -1.0 : 1.0) * v(i);
    out(static_cast<std::int64_t>(static_cast<std::uint64_t>(i) ^ xm)) = amp;
  }
  return out;
}

double DenseOracle::pauli_expectation(const Eigen::VectorXcd& psi,
                                      const PauliString& p) const {
  const Eigen::VectorXcd pv = apply_pauli_vec(psi, mask_of(p.x_words()), mask_of(p.z_words()));
  const cplx num = psi.dot(pv);  // conjugates psi
  return num.real() / psi.squaredNorm();
}

void DenseOracle::apply_channel_site(Eigen::MatrixXcd& rho, const Channel& channel, int q) {
  const std::int64_t d = rho.rows();
  const std::int64_t bit = std::int64_t(1) << q;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& k : channel.kraus()) {
    // (K_q rho K_q^dag)_{ij} = sum_{a,b} K(i_q, a) rho(i|a, j|b) conj(K(j_q, b))
    for (std::int64_t i = 0; i < d; ++i) {
      const int iq = (i & bit) ? 1 : 0;
      const std::int64_t i0 = i & ~bit;
      for (std::int64_t j = 0; j < d; ++j) {
        const int jq = (j & bit) ? 1 : 0;
        const std::int64_t j0 = j & ~bit;
        cplx acc = 0.0;
        for (int a = 0; a < 2; ++a) {
          const cplx ka = k(iq, a);
          if (ka == cplx(0.0, 0.0)) continue;
          for (int b = 0; b < 2; ++b) {
            const cplx kb = std::conj(k(jq, b));
            if (kb == cplx(0.0, 0.0)) continue;
            acc += ka * kb * rho(i0 | (std::int64_t(a) << q), j0 | (std::int64_t(b) << q));
          }
        }
        out(i, j) += acc;
      }
    }
  }
  rho = std::move(out);
}

Eigen::MatrixXcd DenseOracle::noisy_bell_density(const Channel& channel) const {
  Eigen::MatrixXcd rho = bell_ * bell_.adjoint();
  for (int q = 0; q < n_; ++q) apply_channel_site(rho, channel, q);
  return rho;
}

void DenseOracle::project_check(Eigen::MatrixXcd& rho, const Check& ch, int outcome) const {
  const PauliString p = layout_->check_pauli(ch);
  const std::uint64_t xm = mask_of(p.x_words());
  const std::uint64_t zm = mask_of(p.z_words());
  const std::int64_t d = rho.rows();
  const double sgn = outcome > 0 ? 1.0 : -1.0;
  // rho <- P rho P with P = (I + sgn A)/2; A has no Y support (CSS checks).
  Eigen::MatrixXcd arho(d, d), rhoa(d, d);
  for (std::int64_t i = 0; i < d; ++i) {
    const double phi = parity(static_cast<std::uint64_t>(i) & zm) ? -1.0 : 1.0;
    arho.row(static_cast<std::int64_t>(static_cast<std::uint64_t>(i) ^ xm)) =
        phi * rho.row(i);
    rhoa.col(static_cast<std::int64_t>(static_cast<std::uint64_t>(i) ^ xm)) =
        phi * rho.col(i);
  }
  Eigen::MatrixXcd arhoa(d, d);
  for (std::int64_t i = 0; i < d; ++i) {
    const double phi = parity(static_cast<std::uint64_t>(i) & zm) ? -1.0 : 1.0;
    arhoa.row(static_cast<std::int64_t>(static_cast<std::uint64_t>(i) ^ xm)) =
        phi * arho.row(i);
  }
  rho = 0.25 * (rho + sgn * arho + sgn * rhoa + arhoa);
}

Eigen::Matrix4d DenseOracle::process_matrix_of(const Eigen::MatrixXcd& projected,
                                               const Syndrome& s) const {
  const PauliString t = layout_->recovery_pauli(s);
  const std::uint64_t txm = mask_of(t.x_words());
  const std::uint64_t tzm = mask_of(t.z_words());
  const std::int64_t d = projected.rows();

  // rho' = T_s rho T_s (T_s is Hermitian up to the i^{|x&z|} convention,
  // and the two phases cancel between left and right application).
  Eigen::MatrixXcd rho(d, d);
  for (std::int64_t i = 0; i < d; ++i) {
    const double phi = parity(static_cast<std::uint64_t>(i) & tzm) ? -1.0 : 1.0;
    for (std::int64_t j = 0; j < d; ++j) {
      const double phj = parity(static_cast<std::uint64_t>(j) & tzm) ? -1.0 : 1.0;
      rho(static_cast<std::int64_t>(static_cast<std::uint64_t>(i) ^ txm),
          static_cast<std::int64_t>(static_cast<std::uint64_t>(j) ^ txm)) =
          phi * phj * projected(i, j);
    }
  }

  // Logical Pauli masks on the data register; ancilla is bit n_.
  const std::uint64_t lx = mask_of(layout_->logical_x().x_words());
  const std::uint64_t lz = mask_of(layout_->logical_z().z_words());
  const std::uint64_t abit = std::uint64_t(1) << n_;

  Eigen::Matrix4d c;
  for (int i = 0; i < 4; ++i) {
    const std::uint64_t dxm = (i == 1 || i == 2) ? lx : 0;
    const std::uint64_t dzm = (i == 2 || i == 3) ? lz : 0;
    for (int j = 0; j < 4; ++j) {
      const std::uint64_t axm = (j == 1 || j == 2) ? abit : 0;
      const std::uint64_t azm = (j == 2 || j == 3) ? abit : 0;
      const std::uint64_t xm = dxm | axm;
      const std::uint64_t zm = dzm | azm;
      const cplx ph = pauli_phase(xm, zm);
      // Tr(P rho) = sum_k ph * (-1)^{<z, k^x>} rho(k^x, k).
      cplx acc = 0.0;
      for (std::int64_t k = 0; k < d; ++k) {
        const std::uint64_t kx = static_cast<std::uint64_t>(k) ^ xm;
        const double phk = parity(kx & zm) ? -1.0 : 1.0;
        acc += ph * phk * rho(static_cast<std::int64_t>(kx), k);
      }
      if (std::abs(acc.imag()) > 1e-8 * std::max(1.0, std::abs(acc.real())))
        throw std::logic_error("DenseOracle: process matrix entry not real");
      c(i, j) = acc.real();
    }
  }
  if (std::abs(c(0, 0)) < 1e-300)
    throw std::logic_error("DenseOracle: zero-probability syndrome");
  return c / c(0, 0);
}

DenseOracle::SyndromeReport DenseOracle::analyze_syndrome(const Eigen::MatrixXcd& noisy_rho,
                                                          const Syndrome& s) const {
  const auto& checks = layout_->checks();
  if (s.outcomes.size() != checks.size())
    throw std::invalid_argument("analyze_syndrome: syndrome length mismatch");
  Eigen::MatrixXcd rho = noisy_rho;
  const double norm0 = noisy_rho.trace().real();
  for (std::size_t k = 0; k < checks.size(); ++k)
    project_check(rho, checks[k], s.outcomes[k]);

  SyndromeReport rep;
  rep.syndrome = s;
  rep.probability = rho.trace().real() / norm0;
  rep.c = process_matrix_of(rho, s);
  return rep;
}

void DenseOracle::recurse(Eigen::MatrixXcd rho, std::size_t k, Syndrome& s, double norm0,
                          std::vector<SyndromeReport>& out) const {
  const auto& checks = layout_->checks();
  if (k == checks.size()) {
    SyndromeReport rep;
    rep.syndrome = s;
    rep.probability = rho.trace().real() / norm0;
    if (rep.probability > 1e-14) {
      rep.c = process_matrix_of(rho, s);
    } else {
      rep.c.setZero();
      rep.c(0, 0) = 1.0;
    }
    out.push_back(std::move(rep));
    return;
  }
  for (int outcome : {+1, -1}) {
    Eigen::MatrixXcd next = rho;
    project_check(next, checks[k], outcome);
    s.outcomes.push_back(outcome);
    recurse(std::move(next), k + 1, s, norm0, out);
    s.outcomes.pop_back();
  }
}

std::vector<DenseOracle::SyndromeReport> DenseOracle::enumerate_round(
    const Channel& channel) const {
  const Eigen::MatrixXcd rho = noisy_bell_density(channel);
  std::vector<SyndromeReport> out;
  out.reserve(std::size_t(1) << layout_->checks().size());
  Syndrome s;
  recurse(rho, 0, s, rho.trace().real(), out);
  return out;
}

}  // namespace surfsim
