#include "surfsim/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace surfsim {

namespace {

std::int64_t shape_size(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor dimension must be positive");
    n *= d;
  }
  return n;
}

using MatrixC =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<MatrixC>;
using ConstMapC = Eigen::Map<const MatrixC>;

}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(static_cast<std::size_t>(shape_size(shape_)), cplx(0.0, 0.0));
}

Tensor Tensor::scalar(cplx value) {
  Tensor t{std::vector<int>{}};
  t.data_.assign(1, value);
  return t;
}

Tensor Tensor::identity(int dim) {
  Tensor t{{dim, dim}};
  for (int i = 0; i < dim; ++i) t.at({i, i}) = 1.0;
  return t;
}

Tensor Tensor::from_flat(std::vector<int> shape, std::vector<cplx> data) {
  if (shape_size(shape) != static_cast<std::int64_t>(data.size()))
    throw std::invalid_argument("from_flat: data length does not match shape");
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(data);
  return t;
}

cplx& Tensor::at(std::span<const int> idx) {
  return const_cast<cplx&>(std::as_const(*this).at(idx));
}

const cplx& Tensor::at(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != rank())
    throw std::invalid_argument("at: wrong number of indices");
  std::int64_t off = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= shape_[k]) throw std::out_of_range("at: index out of range");
    off = off * shape_[k] + idx[k];
  }
  return data_[static_cast<std::size_t>(off)];
}

Tensor& Tensor::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Tensor& Tensor::operator*=(double s) { return (*this) *= cplx(s, 0.0); }

Tensor Tensor::operator*(cplx s) const {
  Tensor t = *this;
  t *= s;
  return t;
}

Tensor Tensor::operator+(const Tensor& other) const {
  if (shape_ != other.shape_) throw std::invalid_argument("operator+: shape mismatch");
  Tensor t = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) t.data_[i] += other.data_[i];
  return t;
}

Tensor Tensor::operator-(const Tensor& other) const {
  if (shape_ != other.shape_) throw std::invalid_argument("operator-: shape mismatch");
  Tensor t = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) t.data_[i] -= other.data_[i];
  return t;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Tensor::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

Tensor Tensor::conjugate() const {
  Tensor t = *this;
  for (auto& v : t.data_) v = std::conj(v);
  return t;
}

Tensor Tensor::reshaped(std::vector<int> new_shape) const {
  if (shape_size(new_shape) != size())
    throw std::invalid_argument("reshaped: total size must be preserved");
  Tensor t = *this;
  t.shape_ = std::move(new_shape);
  return t;
}

Tensor permute(const Tensor& t, std::span<const int> perm) {
  const int r = t.rank();
  if (static_cast<int>(perm.size()) != r)
    throw std::invalid_argument("permute: permutation length mismatch");
  std::vector<bool> seen(static_cast<std::size_t>(r), false);
  for (int p : perm) {
    if (p < 0 || p >= r || seen[static_cast<std::size_t>(p)])
      throw std::invalid_argument("permute: invalid permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }
  bool is_id = true;
  for (int k = 0; k < r; ++k)
    if (perm[static_cast<std::size_t>(k)] != k) is_id = false;
  if (is_id) return t;

  std::vector<int> out_shape(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) out_shape[static_cast<std::size_t>(k)] = t.dim(perm[k]);

  // Input strides, then reordered so stride_for_out_axis[k] follows perm.
  std::vector<std::int64_t> in_strides(static_cast<std::size_t>(r), 1);
  for (int k = r - 2; k >= 0; --k)
    in_strides[static_cast<std::size_t>(k)] = in_strides[static_cast<std::size_t>(k + 1)] * t.dim(k + 1);
  std::vector<std::int64_t> strides(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k)
    strides[static_cast<std::size_t>(k)] = in_strides[static_cast<std::size_t>(perm[k])];

  Tensor out(out_shape);
  const std::int64_t n = out.size();
  std::vector<int> counter(static_cast<std::size_t>(r), 0);
  std::int64_t in_off = 0;
  const cplx* src = t.data();
  cplx* dst = out.data();
  for (std::int64_t i = 0; i < n; ++i) {
    dst[i] = src[in_off];
    for (int k = r - 1; k >= 0; --k) {
      auto ku = static_cast<std::size_t>(k);
      if (++counter[ku] < out_shape[ku]) {
        in_off += strides[ku];
        break;
      }
      counter[ku] = 0;
      in_off -= strides[ku] * (out_shape[ku] - 1);
    }
  }
  return out;
}

Tensor permute(const Tensor& t, std::initializer_list<int> perm) {
  return permute(t, std::span<const int>(perm.begin(), perm.size()));
}

Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const std::pair<int, int>> pairs) {
  const int ra = a.rank();
  const int rb = b.rank();
  std::vector<bool> used_a(static_cast<std::size_t>(ra), false);
  std::vector<bool> used_b(static_cast<std::size_t>(rb), false);
  for (const auto& [ia, ib] : pairs) {
    if (ia < 0 || ia >= ra || ib < 0 || ib >= rb)
      throw std::invalid_argument("contract: index out of range");
    if (used_a[static_cast<std::size_t>(ia)] || used_b[static_cast<std::size_t>(ib)])
      throw std::invalid_argument("contract: repeated index in pairs");
    if (a.dim(ia) != b.dim(ib))
      throw std::invalid_argument("contract: paired dimensions do not match");
    used_a[static_cast<std::size_t>(ia)] = true;
    used_b[static_cast<std::size_t>(ib)] = true;
  }

  std::vector<int> free_a, free_b;
  for (int k = 0; k < ra; ++k)
    if (!used_a[static_cast<std::size_t>(k)]) free_a.push_back(k);
  for (int k = 0; k < rb; ++k)
    if (!used_b[static_cast<std::size_t>(k)]) free_b.push_back(k);

  // a -> (free_a..., contracted in pair order), b -> (contracted, free_b...)
  std::vector<int> perm_a = free_a;
  std::vector<int> perm_b;
  for (const auto& pr : pairs) perm_a.push_back(pr.first);
  for (const auto& pr : pairs) perm_b.push_back(pr.second);
  for (int k : free_b) perm_b.push_back(k);

  Tensor pa = permute(a, std::span<const int>(perm_a.data(), perm_a.size()));
  Tensor pb = permute(b, std::span<const int>(perm_b.data(), perm_b.size()));

  std::int64_t m = 1, k = 1, n = 1;
  for (int idx : free_a) m *= a.dim(idx);
  for (const auto& pr : pairs) k *= a.dim(pr.first);
  for (int idx : free_b) n *= b.dim(idx);

  std::vector<int> out_shape;
  out_shape.reserve(free_a.size() + free_b.size());
  for (int idx : free_a) out_shape.push_back(a.dim(idx));
  for (int idx : free_b) out_shape.push_back(b.dim(idx));

  Tensor out(out_shape);
  ConstMapC ma(pa.data(), m, k);
  ConstMapC mb(pb.data(), k, n);
  MapC mo(out.data(), m, n);
  mo.noalias() = ma * mb;
  return out;
}

Tensor contract(const Tensor& a, const Tensor& b,
                std::initializer_list<std::pair<int, int>> pairs) {
  return contract(a, b, std::span<const std::pair<int, int>>(pairs.begin(), pairs.size()));
}

Tensor partial_trace(const Tensor& t, std::span<const std::pair<int, int>> pairs) {
  const int r = t.rank();
  std::vector<bool> used(static_cast<std::size_t>(r), false);
  for (const auto& [i, j] : pairs) {
    if (i < 0 || i >= r || j < 0 || j >= r || i == j)
      throw std::invalid_argument("partial_trace: invalid index pair");
    if (used[static_cast<std::size_t>(i)] || used[static_cast<std::size_t>(j)])
      throw std::invalid_argument("partial_trace: repeated index");
    if (t.dim(i) != t.dim(j))
      throw std::invalid_argument("partial_trace: paired dimensions do not match");
    used[static_cast<std::size_t>(i)] = true;
    used[static_cast<std::size_t>(j)] = true;
  }

  std::vector<int> survivors;
  for (int k = 0; k < r; ++k)
    if (!used[static_cast<std::size_t>(k)]) survivors.push_back(k);

  // Permute to (survivors..., i1, j1, i2, j2, ...) and sum diagonals.
  std::vector<int> perm = survivors;
  for (const auto& pr : pairs) {
    perm.push_back(pr.first);
    perm.push_back(pr.second);
  }
  Tensor p = permute(t, std::span<const int>(perm.data(), perm.size()));

  std::vector<int> out_shape;
  std::int64_t out_n = 1;
  for (int idx : survivors) {
    out_shape.push_back(t.dim(idx));
    out_n *= t.dim(idx);
  }
  Tensor out(out_shape);

  // Trailing block of p has shape (d1, d1, d2, d2, ...).
  std::vector<int> dims;
  for (const auto& pr : pairs) dims.push_back(t.dim(pr.first));
  std::int64_t block = 1;
  for (int d : dims) block *= static_cast<std::int64_t>(d) * d;

  const cplx* src = p.data();
  for (std::int64_t o = 0; o < out_n; ++o) {
    // Sum src[o*block + diag] over the multi-diagonal.
    cplx acc = 0.0;
    std::vector<int> c(dims.size(), 0);
    while (true) {
      std::int64_t off = 0;
      for (std::size_t q = 0; q < dims.size(); ++q)
        off = (off * dims[q] + c[q]) * dims[q] + c[q];
      acc += src[o * block + off];
      std::size_t q = dims.size();
      while (q > 0) {
        --q;
        if (++c[q] < dims[q]) break;
        c[q] = 0;
        if (q == 0) goto done;
      }
      if (dims.empty()) break;
    }
  done:
    out[o] = acc;
  }
  return out;
}

Tensor partial_trace(const Tensor& t, std::initializer_list<std::pair<int, int>> pairs) {
  return partial_trace(t, std::span<const std::pair<int, int>>(pairs.begin(), pairs.size()));
}

SvdSplit svd_split(const Tensor& t, std::span<const int> left_indices,
                   std::span<const int> right_indices, int chi, double floor) {
  if (chi < 1) throw std::invalid_argument("svd_split: chi must be >= 1");
  const int r = t.rank();
  if (static_cast<int>(left_indices.size() + right_indices.size()) != r)
    throw std::invalid_argument("svd_split: partition must cover all indices");
  std::vector<bool> seen(static_cast<std::size_t>(r), false);
  auto mark = [&](int idx) {
    if (idx < 0 || idx >= r || seen[static_cast<std::size_t>(idx)])
      throw std::invalid_argument("svd_split: invalid partition");
    seen[static_cast<std::size_t>(idx)] = true;
  };
  for (int idx : left_indices) mark(idx);
  for (int idx : right_indices) mark(idx);

  std::vector<int> perm(left_indices.begin(), left_indices.end());
  perm.insert(perm.end(), right_indices.begin(), right_indices.end());
  Tensor p = permute(t, std::span<const int>(perm.data(), perm.size()));

  std::int64_t m = 1, n = 1;
  std::vector<int> lshape, rshape;
  for (int idx : left_indices) {
    lshape.push_back(t.dim(idx));
    m *= t.dim(idx);
  }
  for (int idx : right_indices) {
    rshape.push_back(t.dim(idx));
    n *= t.dim(idx);
  }

  ConstMapC mat(p.data(), m, n);
  Eigen::JacobiSVD<MatrixC> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const int full = static_cast<int>(sv.size());

  int keep = 0;
  for (int i = 0; i < full && i < chi; ++i) {
    if (sv(i) < floor && keep > 0) break;
    ++keep;
  }
  if (keep == 0) keep = 1;

  double discarded = 0.0;
  for (int i = keep; i < full; ++i) discarded += sv(i) * sv(i);

  MatrixC u = svd.matrixU().leftCols(keep);
  MatrixC sv_dag = sv.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();

  lshape.push_back(keep);
  rshape.insert(rshape.begin(), keep);

  SvdSplit out;
  out.kept = keep;
  out.discarded_weight = discarded;
  out.left = Tensor(lshape);
  out.right = Tensor(rshape);
  MapC(out.left.data(), m, keep) = u;
  MapC(out.right.data(), keep, n) = sv_dag;
  return out;
}

SvdSplit svd_split(const Tensor& t, std::initializer_list<int> left_indices,
                   std::initializer_list<int> right_indices, int chi, double floor) {
  return svd_split(t, std::span<const int>(left_indices.begin(), left_indices.size()),
                   std::span<const int>(right_indices.begin(), right_indices.size()), chi,
                   floor);
}

}  // namespace surfsim
