#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace surfsim {

using cplx = std::complex<double>;

/// Dense complex tensor with row-major storage.
///
/// Index order is significant everywhere: operations that produce new
/// tensors document the order of the surviving indices. All dimensions
/// here are small (typically 2 or small powers of 2), so storage is a
/// flat contiguous array and contraction is permute-then-GEMM.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);

  static Tensor scalar(cplx value);
  /// Identity matrix as a rank-2 tensor.
  static Tensor identity(int dim);
  /// Rank-N tensor from a flat row-major list of entries.
  static Tensor from_flat(std::vector<int> shape, std::vector<cplx> data);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int dim(int k) const { return shape_[static_cast<std::size_t>(k)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  cplx& operator[](std::int64_t flat) { return data_[static_cast<std::size_t>(flat)]; }
  const cplx& operator[](std::int64_t flat) const { return data_[static_cast<std::size_t>(flat)]; }

  cplx& at(std::span<const int> idx);
  const cplx& at(std::span<const int> idx) const;
  cplx& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }
  const cplx& at(std::initializer_list<int> idx) const {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }

  Tensor& operator*=(cplx s);
  Tensor& operator*=(double s);
  Tensor operator*(cplx s) const;
  Tensor operator+(const Tensor& other) const;
  Tensor operator-(const Tensor& other) const;

  /// Largest entry magnitude; 0 for an all-zero tensor.
  double max_abs() const;
  double frobenius_norm() const;
  Tensor conjugate() const;

  /// Reinterpret the flat data with a new shape of equal total size.
  Tensor reshaped(std::vector<int> new_shape) const;

 private:
  std::vector<int> shape_;
  std::vector<cplx> data_;
};

/// Contract paired indices of `a` and `b`.
///
/// Output index order: the surviving indices of `a` in their original
/// order, followed by the surviving indices of `b` in their original
/// order. `pairs` lists (index-of-a, index-of-b); paired dimensions must
/// match and indices must not repeat within a side. An empty `pairs`
/// yields the tensor product.
Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const std::pair<int, int>> pairs);
Tensor contract(const Tensor& a, const Tensor& b,
                std::initializer_list<std::pair<int, int>> pairs);

/// Permute indices: output index k is input index perm[k].
Tensor permute(const Tensor& t, std::span<const int> perm);
Tensor permute(const Tensor& t, std::initializer_list<int> perm);

/// Sum over the diagonal of each (first, second) index pair. Surviving
/// indices keep their original relative order.
Tensor partial_trace(const Tensor& t, std::span<const std::pair<int, int>> pairs);
Tensor partial_trace(const Tensor& t, std::initializer_list<std::pair<int, int>> pairs);

struct SvdSplit {
  Tensor left;    // indices: left group + new bond (last)
  Tensor right;   // indices: new bond (first) + right group
  int kept = 0;   // retained singular values
  double discarded_weight = 0.0;  // sum of squared dropped singular values
};

/// Split `t` across the (left, right) index partition by SVD, keeping at
/// most `chi` singular values and dropping any below `floor` (absolute).
/// At least one singular value is always kept. left * right is the best
/// Frobenius-norm approximation of the given rank; singular values are
/// absorbed into the right factor.
SvdSplit svd_split(const Tensor& t, std::span<const int> left_indices,
                   std::span<const int> right_indices, int chi,
                   double floor = 1e-14);
SvdSplit svd_split(const Tensor& t, std::initializer_list<int> left_indices,
                   std::initializer_list<int> right_indices, int chi,
                   double floor = 1e-14);

}  // namespace surfsim
