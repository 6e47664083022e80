#include "surfsim/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace surfsim {

PauliString::PauliString(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 0) throw std::invalid_argument("PauliString: negative qubit count");
  const std::size_t words = static_cast<std::size_t>((n_qubits + 63) / 64);
  xw_.assign(words, 0);
  zw_.assign(words, 0);
}

bool PauliString::bit(const std::vector<std::uint64_t>& w, int q) {
  return (w[static_cast<std::size_t>(q / 64)] >> (q % 64)) & 1ULL;
}

void PauliString::set_bit(std::vector<std::uint64_t>& w, int q, bool v) {
  auto& word = w[static_cast<std::size_t>(q / 64)];
  const std::uint64_t mask = 1ULL << (q % 64);
  if (v)
    word |= mask;
  else
    word &= ~mask;
}

void PauliString::mul(const PauliString& other) {
  if (other.n_ != n_) throw std::invalid_argument("PauliString::mul: size mismatch");
  for (std::size_t i = 0; i < xw_.size(); ++i) {
    xw_[i] ^= other.xw_[i];
    zw_[i] ^= other.zw_[i];
  }
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (other.n_ != n_) throw std::invalid_argument("commutes_with: size mismatch");
  // Symplectic form: parity of |x1 & z2| + |z1 & x2|.
  int par = 0;
  for (std::size_t i = 0; i < xw_.size(); ++i) {
    par ^= std::popcount(xw_[i] & other.zw_[i]) & 1;
    par ^= std::popcount(zw_[i] & other.xw_[i]) & 1;
  }
  return par == 0;
}

bool PauliString::is_identity() const {
  for (std::size_t i = 0; i < xw_.size(); ++i)
    if (xw_[i] | zw_[i]) return false;
  return true;
}

int PauliString::weight() const {
  int w = 0;
  for (std::size_t i = 0; i < xw_.size(); ++i) w += std::popcount(xw_[i] | zw_[i]);
  return w;
}

std::string PauliString::to_string() const {
  std::string s;
  s.reserve(static_cast<std::size_t>(n_));
  for (int q = 0; q < n_; ++q) {
    const bool hx = x(q), hz = z(q);
    s.push_back(hx ? (hz ? 'Y' : 'X') : (hz ? 'Z' : 'I'));
  }
  return s;
}

int gf2_rank(std::vector<std::vector<std::uint64_t>> rows) {
  int rank = 0;
  const std::size_t nrows = rows.size();
  if (nrows == 0) return 0;
  const std::size_t words = rows[0].size();
  std::size_t pivot_row = 0;
  for (std::size_t w = 0; w < words && pivot_row < nrows; ++w) {
    for (int b = 0; b < 64 && pivot_row < nrows; ++b) {
      const std::uint64_t mask = 1ULL << b;
      std::size_t sel = nrows;
      for (std::size_t r = pivot_row; r < nrows; ++r) {
        if (rows[r][w] & mask) {
          sel = r;
          break;
        }
      }
      if (sel == nrows) continue;
      std::swap(rows[sel], rows[pivot_row]);
      for (std::size_t r = 0; r < nrows; ++r) {
        if (r != pivot_row && (rows[r][w] & mask)) {
          for (std::size_t k = 0; k < words; ++k) rows[r][k] ^= rows[pivot_row][k];
        }
      }
      ++pivot_row;
      ++rank;
    }
  }
  return rank;
}

}  // namespace surfsim
