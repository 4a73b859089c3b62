#include "fbpinn/block_matrix.hpp"

#include <algorithm>
#include <stdexcept>

#include "fbpinn/parallel.hpp"

namespace fbpinn {

BlockSymMatrix::BlockSymMatrix(std::vector<int> block_sizes,
                               std::vector<std::pair<int, int>> adjacency)
    : sizes_(std::move(block_sizes)), pairs_(std::move(adjacency)) {
  const int nb = static_cast<int>(sizes_.size());
  offsets_.resize(nb);
  dim_ = 0;
  for (int k = 0; k < nb; ++k) {
    offsets_[k] = dim_;
    dim_ += sizes_[k];
  }
  for (auto& [k, l] : pairs_) {
    if (k > l) std::swap(k, l);
    if (k < 0 || l >= nb) throw std::invalid_argument("BlockSymMatrix: pair out of range");
  }
  for (int k = 0; k < nb; ++k) pairs_.emplace_back(k, k);
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());

  index_.assign(static_cast<std::size_t>(nb) * nb, -1);
  data_offset_.resize(pairs_.size());
  std::size_t total = 0;
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto [k, l] = pairs_[p];
    index_[static_cast<std::size_t>(k) * nb + l] = static_cast<int>(p);
    data_offset_[p] = static_cast<int>(total);
    total += static_cast<std::size_t>(sizes_[k]) * sizes_[l];
  }
  data_.assign(total, 0.0);
}

int BlockSymMatrix::pair_index(int k, int l) const {
  return index_[static_cast<std::size_t>(k) * sizes_.size() + l];
}

bool BlockSymMatrix::stored(int k, int l) const {
  if (k > l) std::swap(k, l);
  return pair_index(k, l) >= 0;
}

std::span<double> BlockSymMatrix::block(int k, int l) {
  const int p = pair_index(k, l);
  if (p < 0) throw std::out_of_range("BlockSymMatrix: block not stored");
  return {data_.data() + data_offset_[p], static_cast<std::size_t>(sizes_[k]) * sizes_[l]};
}

std::span<const double> BlockSymMatrix::block(int k, int l) const {
  const int p = pair_index(k, l);
  if (p < 0) throw std::out_of_range("BlockSymMatrix: block not stored");
  return {data_.data() + data_offset_[p], static_cast<std::size_t>(sizes_[k]) * sizes_[l]};
}

void BlockSymMatrix::clear() { std::fill(data_.begin(), data_.end(), 0.0); }

void BlockSymMatrix::scale(double s) {
  for (double& v : data_) v *= s;
}

void BlockSymMatrix::add_outer(const ResidualRow& row, double scale) {
  for (std::size_t a = 0; a < row.segs.size(); ++a) {
    for (std::size_t bseg = a; bseg < row.segs.size(); ++bseg) {
      const auto& sk = row.segs[a];
      const auto& sl = row.segs[bseg];
      const int p = pair_index(sk.block, sl.block);
      if (p < 0)
        throw std::runtime_error("BlockSymMatrix: row support spans a non-adjacent block pair");
      double* blk = data_.data() + data_offset_[p];
      const int ncol = sizes_[sl.block];
      for (std::size_t i = 0; i < sk.g.size(); ++i) {
        const double gi = scale * sk.g[i];
        double* out = blk + static_cast<std::size_t>(i) * ncol;
        const double* gl = sl.g.data();
        for (std::size_t j = 0; j < sl.g.size(); ++j) out[j] += gi * gl[j];
      }
    }
  }
}

void BlockSymMatrix::add(const BlockSymMatrix& other) {
  if (other.data_.size() != data_.size())
    throw std::invalid_argument("BlockSymMatrix::add: layout mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

void BlockSymMatrix::matvec(std::span<const double> x, std::span<double> y, double mu) const {
  for (int i = 0; i < dim_; ++i) y[i] = mu * x[i];
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto [k, l] = pairs_[p];
    const double* blk = data_.data() + data_offset_[p];
    const int nk = sizes_[k], nl = sizes_[l];
    const double* xk = x.data() + offsets_[k];
    const double* xl = x.data() + offsets_[l];
    double* yk = y.data() + offsets_[k];
    double* yl = y.data() + offsets_[l];
    for (int i = 0; i < nk; ++i) {
      const double* bi = blk + static_cast<std::size_t>(i) * nl;
      double acc = 0.0;
      for (int j = 0; j < nl; ++j) acc += bi[j] * xl[j];
      yk[i] += acc;
    }
    if (k != l) {
      for (int i = 0; i < nk; ++i) {
        const double* bi = blk + static_cast<std::size_t>(i) * nl;
        const double xi = xk[i];
        for (int j = 0; j < nl; ++j) yl[j] += bi[j] * xi;
      }
    }
  }
}

std::vector<double> BlockSymMatrix::densify() const {
  std::vector<double> dense(static_cast<std::size_t>(dim_) * dim_, 0.0);
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto [k, l] = pairs_[p];
    const double* blk = data_.data() + data_offset_[p];
    const int nk = sizes_[k], nl = sizes_[l];
    for (int i = 0; i < nk; ++i)
      for (int j = 0; j < nl; ++j) {
        const double v = blk[static_cast<std::size_t>(i) * nl + j];
        dense[static_cast<std::size_t>(offsets_[k] + i) * dim_ + offsets_[l] + j] = v;
        dense[static_cast<std::size_t>(offsets_[l] + j) * dim_ + offsets_[k] + i] = v;
      }
  }
  return dense;
}

GramAccumulator::GramAccumulator(std::vector<int> block_sizes,
                                 std::vector<std::pair<int, int>> adjacency)
    : result_(std::move(block_sizes), std::move(adjacency)) {}

const BlockSymMatrix& GramAccumulator::accumulate(const std::vector<ResidualRow>& rows,
                                                  double scale) {
  const int n = static_cast<int>(rows.size());
  partials_.resize(n_chunks(n), result_);
  result_.clear();
  std::exception_ptr err;
  parallel_chunks(n, [&](int c, int begin, int end) {
    partials_[c].clear();
    try {
      for (int i = begin; i < end; ++i) partials_[c].add_outer(rows[i], scale);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  });
  if (err) std::rethrow_exception(err);
  for (const auto& p : partials_) result_.add(p);
  return result_;
}

BlockSymMatrix assemble_gram(const std::vector<ResidualRow>& rows,
                             std::vector<int> block_sizes,
                             std::vector<std::pair<int, int>> adjacency, double scale) {
  GramAccumulator acc(std::move(block_sizes), std::move(adjacency));
  return acc.accumulate(rows, scale);
}

}  // namespace fbpinn
