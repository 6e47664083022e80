#include "surfsim/contraction.hpp"

#include <algorithm>
#include <cmath>

namespace surfsim {

namespace {

constexpr int tag_l(int r) { return -1000 - 2 * r; }
constexpr int tag_r(int r) { return -1001 - 2 * r; }

// Extract the scale of a tensor into a log accumulator, keeping entries O(1).
void extract_scale(Tensor& t, double& log_scale) {
  const double m = t.max_abs();
  if (m > 0.0 && std::isfinite(m)) {
    t *= cplx(1.0 / m, 0.0);
    log_scale += std::log(m);
  }
}

Tensor permute_to_front(const Tensor& t, int p1, int p2) {
  if (p2 < 0) throw std::logic_error("close: ancilla legs must come in pairs");
  std::vector<int> perm{p1, p2};
  for (int k = 0; k < t.rank(); ++k)
    if (k != p1 && k != p2) perm.push_back(k);
  return permute(t, std::span<const int>(perm.data(), perm.size()));
}

}  // namespace

double LogValue::real_ratio(const LogValue& a, const LogValue& b) {
  if (b.is_zero()) throw std::runtime_error("LogValue: division by zero contraction");
  const cplx q = (a.mantissa / b.mantissa) * std::exp(a.log_scale - b.log_scale);
  return q.real();
}

double LogValue::log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }

KeyedTensor contract_keyed(const KeyedTensor& a, const KeyedTensor& b) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < a.keys.size(); ++i) {
    for (std::size_t j = 0; j < b.keys.size(); ++j) {
      if (a.keys[i] == b.keys[j]) {
        pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        break;
      }
    }
  }
  KeyedTensor out;
  out.t = contract(a.t, b.t, std::span<const std::pair<int, int>>(pairs.data(), pairs.size()));
  std::vector<bool> ua(a.keys.size(), false), ub(b.keys.size(), false);
  for (const auto& [i, j] : pairs) {
    ua[static_cast<std::size_t>(i)] = true;
    ub[static_cast<std::size_t>(j)] = true;
  }
  for (std::size_t i = 0; i < a.keys.size(); ++i)
    if (!ua[i]) out.keys.push_back(a.keys[i]);
  for (std::size_t j = 0; j < b.keys.size(); ++j)
    if (!ub[j]) out.keys.push_back(b.keys[j]);
  return out;
}

KeyedTensor trace_site(const SiteTensor& s, bool keep_ancilla) {
  KeyedTensor out;
  if (s.has_ancilla && !keep_ancilla) {
    out.t = partial_trace(s.t, {{0, 1}, {2, 3}});
  } else {
    out.t = partial_trace(s.t, {{0, 1}});
  }
  if (s.has_ancilla && keep_ancilla) {
    out.keys.push_back(kAncillaKet);
    out.keys.push_back(kAncillaBra);
  }
  out.keys.insert(out.keys.end(), s.virt.begin(), s.virt.end());
  return out;
}

TracedCache::TracedCache(const DensityNetwork& net, bool keep_ancilla)
    : net_(&net), keep_ancilla_(keep_ancilla) {
  const std::size_t n = static_cast<std::size_t>(net.width() * net.length());
  entries_.resize(n);
  stamp_.assign(n, 0);
  valid_.assign(n, false);
}

const KeyedTensor& TracedCache::get(int r, int c) {
  const std::size_t k = static_cast<std::size_t>(c * net_->width() + r);
  const std::uint64_t v = net_->site_version(r, c);
  if (!valid_[k] || stamp_[k] != v) {
    entries_[k] = trace_site(net_->site(r, c), keep_ancilla_);
    stamp_[k] = v;
    valid_[k] = true;
  }
  return entries_[k];
}

std::vector<KeyedTensor> TracedCache::column(int c) {
  std::vector<KeyedTensor> col;
  col.reserve(static_cast<std::size_t>(net_->width()));
  for (int r = 0; r < net_->width(); ++r) col.push_back(get(r, c));
  return col;
}

Boundary ColumnEngine::edge() const {
  Boundary b;
  b.mps = (cfg_.engine == Engine::BoundaryMps);
  if (b.mps) {
    const int w = net_->width();
    b.sites.assign(static_cast<std::size_t>(w), Tensor({1, 1}));
    for (auto& s : b.sites) s.at({0, 0}) = 1.0;
    b.site_keys.assign(static_cast<std::size_t>(w), {});
  } else {
    b.dense.t = Tensor::scalar(1.0);
    b.dense.keys = {};
  }
  return b;
}

bool ColumnEngine::bond_vertical(int key) const {
  if (key < 0) return false;
  return !net_->bonds()[static_cast<std::size_t>(key)].horizontal();
}

void ColumnEngine::absorb(Boundary& b, std::vector<KeyedTensor> column) const {
  if (b.mps)
    absorb_mps(b, column);
  else
    absorb_dense(b, column);
}

void ColumnEngine::absorb_dense(Boundary& b, std::vector<KeyedTensor>& column) const {
  for (auto& site : column) {
    // Predict output size against the memory cap.
    std::vector<bool> consumed(site.keys.size(), false);
    std::int64_t out_size = 1;
    for (std::size_t i = 0; i < b.dense.keys.size(); ++i) {
      bool match = false;
      for (std::size_t j = 0; j < site.keys.size(); ++j) {
        if (b.dense.keys[i] == site.keys[j]) {
          consumed[j] = true;
          match = true;
          break;
        }
      }
      if (!match) out_size *= b.dense.t.dim(static_cast<int>(i));
    }
    for (std::size_t j = 0; j < site.keys.size(); ++j)
      if (!consumed[j]) out_size *= site.t.dim(static_cast<int>(j));
    if (out_size > cfg_.max_tensor_entries)
      throw ResourceError(
          "exact contraction exceeds the memory cap; use the boundary_mps engine");

    b.dense = contract_keyed(b.dense, site);
    extract_scale(b.dense.t, b.log_scale);
  }
}

void ColumnEngine::absorb_mps(Boundary& b, std::vector<KeyedTensor>& column) const {
  const int w = net_->width();
  for (int r = 0; r < w; ++r) {
    KeyedTensor mps;
    mps.t = std::move(b.sites[static_cast<std::size_t>(r)]);
    mps.keys.clear();
    mps.keys.push_back(tag_l(r));
    const auto& pk = b.site_keys[static_cast<std::size_t>(r)];
    mps.keys.insert(mps.keys.end(), pk.begin(), pk.end());
    mps.keys.push_back(tag_r(r));

    KeyedTensor merged = contract_keyed(mps, column[static_cast<std::size_t>(r)]);

    // Regroup legs: [chainL + up-bonds | phys | chainR + down-bonds].
    struct LegRef {
      int pos;
      int key;
    };
    std::vector<LegRef> left, phys, right;
    for (std::size_t k = 0; k < merged.keys.size(); ++k) {
      const int key = merged.keys[k];
      const int pos = static_cast<int>(k);
      if (key == tag_l(r)) {
        left.insert(left.begin(), {pos, key});
      } else if (key == tag_r(r)) {
        right.insert(right.begin(), {pos, key});
      } else if (bond_vertical(key)) {
        const Bond& bd = net_->bonds()[static_cast<std::size_t>(key)];
        if (bd.r2 == r)  // connects to row r-1
          left.push_back({pos, key});
        else
          right.push_back({pos, key});
      } else {
        phys.push_back({pos, key});
      }
    }
    auto by_key = [](const LegRef& a, const LegRef& bb) { return a.key < bb.key; };
    std::sort(left.begin() + 1, left.end(), by_key);
    std::sort(right.begin() + 1, right.end(), by_key);
    std::sort(phys.begin(), phys.end(), by_key);

    std::vector<int> perm;
    std::vector<int> phys_keys;
    std::int64_t dl = 1, dr = 1;
    std::vector<int> shape;
    for (const auto& lr : left) {
      perm.push_back(lr.pos);
      dl *= merged.t.dim(lr.pos);
    }
    shape.push_back(static_cast<int>(dl));
    for (const auto& lr : phys) {
      perm.push_back(lr.pos);
      shape.push_back(merged.t.dim(lr.pos));
      phys_keys.push_back(lr.key);
    }
    for (const auto& lr : right) {
      perm.push_back(lr.pos);
      dr *= merged.t.dim(lr.pos);
    }
    shape.push_back(static_cast<int>(dr));

    Tensor grouped = permute(merged.t, std::span<const int>(perm.data(), perm.size()));
    b.sites[static_cast<std::size_t>(r)] = grouped.reshaped(shape);
    b.site_keys[static_cast<std::size_t>(r)] = std::move(phys_keys);
  }

  // Plain left-to-right SVD truncation sweep.
  for (int r = 0; r + 1 < w; ++r) {
    Tensor& s = b.sites[static_cast<std::size_t>(r)];
    const int rank = s.rank();
    std::vector<int> lg, rg;
    for (int k = 0; k + 1 < rank; ++k) lg.push_back(k);
    rg.push_back(rank - 1);
    SvdSplit split = svd_split(s, std::span<const int>(lg.data(), lg.size()),
                               std::span<const int>(rg.data(), rg.size()), cfg_.chi,
                               cfg_.svd_floor);
    truncation_weight_ += split.discarded_weight;
    s = std::move(split.left);
    Tensor& nxt = b.sites[static_cast<std::size_t>(r + 1)];
    nxt = contract(split.right, nxt, {{1, 0}});
    extract_scale(s, b.log_scale);
  }
  extract_scale(b.sites[static_cast<std::size_t>(w - 1)], b.log_scale);
}

std::pair<Tensor, double> ColumnEngine::close(const Boundary& left,
                                              const Boundary& right) const {
  const double logs = left.log_scale + right.log_scale;
  KeyedTensor e;
  if (!left.mps && !right.mps) {
    e = contract_keyed(left.dense, right.dense);
  } else if (left.mps && right.mps) {
    const int w = net_->width();
    e.t = Tensor({1, 1});
    e.t.at({0, 0}) = 1.0;
    e.keys = {tag_l(0), tag_r(0)};
    for (int r = 0; r < w; ++r) {
      KeyedTensor lr;
      lr.t = left.sites[static_cast<std::size_t>(r)];
      lr.keys.push_back(tag_l(r));
      for (int k : left.site_keys[static_cast<std::size_t>(r)]) lr.keys.push_back(k);
      lr.keys.push_back(tag_l(r + 1));
      e = contract_keyed(e, lr);

      KeyedTensor rr;
      rr.t = right.sites[static_cast<std::size_t>(r)];
      rr.keys.push_back(tag_r(r));
      for (int k : right.site_keys[static_cast<std::size_t>(r)]) rr.keys.push_back(k);
      rr.keys.push_back(tag_r(r + 1));
      e = contract_keyed(e, rr);
    }
  } else {
    throw std::logic_error("close: mixed boundary representations");
  }

  // Only ancilla legs (and trivial chain stubs) may remain.
  int pos_ket = -1, pos_bra = -1;
  for (std::size_t k = 0; k < e.keys.size(); ++k) {
    if (e.keys[k] == kAncillaKet)
      pos_ket = static_cast<int>(k);
    else if (e.keys[k] == kAncillaBra)
      pos_bra = static_cast<int>(k);
    else if (e.t.dim(static_cast<int>(k)) != 1)
      throw std::logic_error("close: unmatched non-trivial leg after contraction (key " +
                             std::to_string(e.keys[k]) + ", dim " +
                             std::to_string(e.t.dim(static_cast<int>(k))) + ")");
  }
  if (pos_ket >= 0) {
    Tensor t = permute_to_front(e.t, pos_ket, pos_bra);
    return {t.reshaped({2, 2}), logs};
  }
  return {e.t.reshaped(std::vector<int>{}), logs};
}

LogValue ColumnEngine::close_scalar(const Boundary& left, const Boundary& right) const {
  auto [t, logs] = close(left, right);
  if (t.rank() != 0) throw std::logic_error("close_scalar: ancilla legs remain open");
  return LogValue{t[0], logs};
}

}  // namespace surfsim
