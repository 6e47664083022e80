#include "surfsim/layout.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace surfsim {

std::string Syndrome::to_hex() const {
  std::string out;
  const int n = static_cast<int>(outcomes.size());
  const int digits = (n + 3) / 4;
  for (int d = digits - 1; d >= 0; --d) {
    int v = 0;
    for (int b = 0; b < 4; ++b) {
      const int k = d * 4 + b;
      if (k < n && outcomes[static_cast<std::size_t>(k)] < 0) v |= 1 << b;
    }
    out.push_back("0123456789abcdef"[v]);
  }
  return out;
}

CodeLayout CodeLayout::build(int w, int l) {
  if (w < 2 || l < 2) throw std::invalid_argument("CodeLayout: W and L must be >= 2");

  CodeLayout lay;
  lay.w_ = w;
  lay.l_ = l;

  // Faces (r, c) are X-checks when (r + c) is even, Z-checks otherwise.
  // Boundary half-faces keep the same coloring: Z-type on the top/bottom
  // rows, X-type on the left/right columns; only half-faces whose color
  // matches the boundary type are kept.
  auto q = [&](int r, int c) { return lay.qubit(r, c); };

  for (int r = 0; r <= w - 2; ++r) {
    for (int c = 0; c <= l - 2; ++c) {
      Check ch;
      ch.kind = ((r + c) % 2 == 0) ? CheckKind::X : CheckKind::Z;
      ch.qubits = {q(r, c), q(r + 1, c), q(r + 1, c + 1), q(r, c + 1)};
      ch.face_r = r;
      ch.face_c = c;
      ch.strip = c;
      lay.checks_.push_back(std::move(ch));
    }
  }
  for (int c = 0; c <= l - 2; ++c) {
    if (c % 2 == 0) {  // top half-face (-1, c) has Z color
      Check ch;
      ch.kind = CheckKind::Z;
      ch.qubits = {q(0, c), q(0, c + 1)};
      ch.face_r = -1;
      ch.face_c = c;
      ch.strip = c;
      lay.checks_.push_back(std::move(ch));
    }
    if ((w - 1 + c) % 2 == 1) {  // bottom half-face (w-1, c)
      Check ch;
      ch.kind = CheckKind::Z;
      ch.qubits = {q(w - 1, c), q(w - 1, c + 1)};
      ch.face_r = w - 1;
      ch.face_c = c;
      ch.strip = c;
      lay.checks_.push_back(std::move(ch));
    }
  }
  for (int r = 0; r <= w - 2; ++r) {
    if (r % 2 == 1) {  // left half-face (r, -1) has X color
      Check ch;
      ch.kind = CheckKind::X;
      ch.qubits = {q(r, 0), q(r + 1, 0)};
      ch.face_r = r;
      ch.face_c = -1;
      ch.strip = 0;
      lay.checks_.push_back(std::move(ch));
    }
    if ((r + l - 1) % 2 == 0) {  // right half-face (r, l-1)
      Check ch;
      ch.kind = CheckKind::X;
      ch.qubits = {q(r, l - 1), q(r + 1, l - 1)};
      ch.face_r = r;
      ch.face_c = l - 1;
      ch.strip = l - 1;
      lay.checks_.push_back(std::move(ch));
    }
  }

  // Measurement order: column strip left to right, top to bottom within a
  // strip (boundary half-faces sort with their face coordinates).
  std::sort(lay.checks_.begin(), lay.checks_.end(), [](const Check& a, const Check& b) {
    if (a.strip != b.strip) return a.strip < b.strip;
    if (a.face_r != b.face_r) return a.face_r < b.face_r;
    return a.face_c < b.face_c;
  });

  lay.logical_x_ = PauliString(w * l);
  for (int c = 0; c < l; ++c) lay.logical_x_.set_x(q(w - 1, c));
  lay.logical_z_ = PauliString(w * l);
  for (int r = 0; r < w; ++r) lay.logical_z_.set_z(q(r, 0));

  lay.verify();
  return lay;
}

PauliString CodeLayout::check_pauli(const Check& ch) const {
  PauliString p(n_qubits());
  for (int qb : ch.qubits) {
    if (ch.kind == CheckKind::X)
      p.set_x(qb);
    else
      p.set_z(qb);
  }
  return p;
}

void CodeLayout::verify() const {
  const int n = n_qubits();
  if (static_cast<int>(checks_.size()) != n - 1)
    throw std::logic_error("CodeLayout: wrong number of checks");

  std::vector<PauliString> paulis;
  paulis.reserve(checks_.size());
  for (const auto& ch : checks_) paulis.push_back(check_pauli(ch));

  for (std::size_t i = 0; i < paulis.size(); ++i)
    for (std::size_t j = i + 1; j < paulis.size(); ++j)
      if (!paulis[i].commutes_with(paulis[j]))
        throw std::logic_error("CodeLayout: checks do not commute");

  // Independence over GF(2): symplectic rows (x-part | z-part).
  std::vector<std::vector<std::uint64_t>> rows;
  for (const auto& p : paulis) {
    std::vector<std::uint64_t> row = p.x_words();
    row.insert(row.end(), p.z_words().begin(), p.z_words().end());
    rows.push_back(std::move(row));
  }
  if (gf2_rank(std::move(rows)) != n - 1)
    throw std::logic_error("CodeLayout: checks are not independent");

  for (const auto& p : paulis) {
    if (!logical_x_.commutes_with(p) || !logical_z_.commutes_with(p))
      throw std::logic_error("CodeLayout: logicals do not commute with checks");
  }
  if (logical_x_.commutes_with(logical_z_))
    throw std::logic_error("CodeLayout: logical X and Z must anticommute");
}

Syndrome CodeLayout::syndrome_of(const PauliString& error) const {
  Syndrome s;
  s.outcomes.reserve(checks_.size());
  for (const auto& ch : checks_)
    s.outcomes.push_back(error.commutes_with(check_pauli(ch)) ? 1 : -1);
  return s;
}

PauliString CodeLayout::recovery_pauli(const Syndrome& s) const {
  if (s.outcomes.size() != checks_.size())
    throw std::invalid_argument("recovery_pauli: syndrome length mismatch");

  PauliString t(n_qubits());
  for (std::size_t k = 0; k < checks_.size(); ++k) {
    if (s.outcomes[k] > 0) continue;
    const Check& ch = checks_[k];
    if (ch.kind == CheckKind::Z) {
      // X-string along row face_r+1 (clamped) from the face to column 0.
      const int row = std::min(ch.face_r + 1, w_ - 1);
      for (int c = 0; c <= ch.face_c; ++c)
        t.set_x(qubit(row, c), !t.x(qubit(row, c)));
    } else {
      // Z-string along column face_c+1 (clamped) from the face to row 0.
      const int col = std::min(ch.face_c + 1, l_ - 1);
      for (int r = 0; r <= ch.face_r; ++r)
        t.set_z(qubit(r, col), !t.z(qubit(r, col)));
    }
  }

  // T_s must anticommute with exactly the flipped checks.
  const Syndrome check = syndrome_of(t);
  if (check.outcomes != s.outcomes)
    throw std::logic_error("recovery_pauli: internal inconsistency");
  return t;
}

std::string CodeLayout::to_json() const {
  nlohmann::json j;
  j["W"] = w_;
  j["L"] = l_;
  auto qubits = nlohmann::json::array();
  for (int c = 0; c < l_; ++c)
    for (int r = 0; r < w_; ++r)
      qubits.push_back({{"id", qubit(r, c)}, {"row", r}, {"col", c}});
  j["qubits"] = std::move(qubits);
  auto checks = nlohmann::json::array();
  for (const auto& ch : checks_) {
    checks.push_back({{"kind", ch.kind == CheckKind::X ? "X" : "Z"},
                      {"qubits", ch.qubits},
                      {"face_row", ch.face_r},
                      {"face_col", ch.face_c},
                      {"strip", ch.strip}});
  }
  j["checks"] = std::move(checks);
  auto collect = [&](const PauliString& p, bool xpart) {
    std::vector<int> qs;
    for (int q = 0; q < n_qubits(); ++q)
      if ((xpart && p.x(q)) || (!xpart && p.z(q))) qs.push_back(q);
    return qs;
  };
  j["logical_x"] = collect(logical_x_, true);
  j["logical_z"] = collect(logical_z_, false);
  return j.dump(2);
}

}  // namespace surfsim
