#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fbpinn/model.hpp"

namespace fbpinn {

// Symmetric matrix over a block layout, storing only the upper-triangular
// blocks of an adjacency set (self pairs always included). Blocks for
// non-overlapping subdomain pairs are provably zero and never stored.
class BlockSymMatrix {
 public:
  BlockSymMatrix() = default;
  BlockSymMatrix(std::vector<int> block_sizes, std::vector<std::pair<int, int>> adjacency);

  int dim() const { return dim_; }
  int n_blocks() const { return static_cast<int>(sizes_.size()); }
  int block_offset(int k) const { return offsets_[k]; }
  int block_size(int k) const { return sizes_[k]; }

  bool stored(int k, int l) const;
  std::span<double> block(int k, int l);  // k <= l, row-major size_k x size_l
  std::span<const double> block(int k, int l) const;
  const std::vector<std::pair<int, int>>& stored_pairs() const { return pairs_; }

  void clear();
  void scale(double s);

  // G += scale * g g^T for the row's sparse gradient. A row whose support
  // spans a pair outside the adjacency set violates decomposition locality
  // and is a hard error.
  void add_outer(const ResidualRow& row, double scale);

  // Accumulate another matrix with the identical layout.
  void add(const BlockSymMatrix& other);

  // y = (G + mu I) x
  void matvec(std::span<const double> x, std::span<double> y, double mu) const;

  std::vector<double> densify() const;  // row-major dim x dim

 private:
  int pair_index(int k, int l) const;

  int dim_ = 0;
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  std::vector<std::pair<int, int>> pairs_;  // sorted, k <= l
  std::vector<int> index_;                  // n_blocks^2 lookup table, -1 when absent
  std::vector<int> data_offset_;            // per stored pair
  std::vector<double> data_;
};

// Builds G = sum_i grad_i grad_i^T restricted to the adjacency set. Row
// chunks are accumulated into per-chunk partials and merged in fixed
// order; the partials are kept between calls so repeated assembly during
// training does not reallocate.
class GramAccumulator {
 public:
  GramAccumulator(std::vector<int> block_sizes, std::vector<std::pair<int, int>> adjacency);
  const BlockSymMatrix& accumulate(const std::vector<ResidualRow>& rows, double scale);
  const BlockSymMatrix& matrix() const { return result_; }

 private:
  BlockSymMatrix result_;
  std::vector<BlockSymMatrix> partials_;
};

BlockSymMatrix assemble_gram(const std::vector<ResidualRow>& rows,
                             std::vector<int> block_sizes,
                             std::vector<std::pair<int, int>> adjacency,
                             double scale = 1.0);

}  // namespace fbpinn
