#pragma once

// Image distance by aligning the W local features of two images.
//
// The cumulative grid follows the four-case recurrence
//   s(0,0)   = d(0,0)
//   s(0,j)   = d(0,j) + s(0,j-1)
//   s(i,0)   = d(i,0) + s(i-1,0)
//   s(i,j)   = min(a*d(i,j) + s(i-1,j-1), d(i,j) + s(i-1,j), d(i,j) + s(i,j-1))
// and a parallel cost grid charges `a` only when the diagonal candidate is
// strictly smaller than both others, 1 otherwise. The image distance is
// s(W-1,W-1) / cost(W-1,W-1).

#include <cstdint>
#include <vector>

#include "vpralign/core.hpp"

namespace vpralign {

struct AdaptiveWeight {
  double a = 1.0;
  /// 0-based column of the central row's smallest finite distance.
  std::size_t best_index = 0;
};

/// 0-based index of the central local feature, i.e. ceil(W/2) - 1.
constexpr std::size_t central_index(std::size_t width) { return (width + 1) / 2 - 1; }

/// W x W grid of point distances. With `restricted`, cells with |i-j| >= xi
/// are +infinity and never evaluated.
DistanceMatrix build_distance_matrix(const FeatureSequence& x, const FeatureSequence& y,
                                     bool restricted, std::size_t xi);

/// a = sqrt(1 + sigma * |I - c|) where I minimises the central row over its
/// finite cells (first index on ties) and c is the central index.
AdaptiveWeight adaptive_weight(const DistanceMatrix& d, double sigma);

/// Back-pointer per cell. diagonal_weighted marks a diagonal that strictly won
/// and was charged the weight; a tied diagonal is plain `diagonal`.
enum class Step : std::uint8_t { start, diagonal, diagonal_weighted, vertical, horizontal };

/// Filled cumulative, cost and back-pointer grids for one distance grid.
/// Reusable across calls to avoid reallocation.
class DtwTables {
 public:
  void accumulate(MatrixView d, double weight);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  /// Cells written by the last accumulate().
  std::uint64_t cell_updates() const { return cell_updates_; }
  double cumulative(std::size_t i, std::size_t j) const { return cumulative_[i * cols_ + j]; }
  double cost(std::size_t i, std::size_t j) const { return cost_[i * cols_ + j]; }
  Step step(std::size_t i, std::size_t j) const { return steps_[i * cols_ + j]; }

  /// Path from (0,0) to (end_row, end_col), with per-point costs.
  WarpingPath backtrace(std::size_t end_row, std::size_t end_col) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double weight_ = 1.0;
  std::uint64_t cell_updates_ = 0;
  std::vector<double> cumulative_;
  std::vector<double> cost_;
  std::vector<Step> steps_;
};

/// Image distance between x and y under cfg.mode.
///
/// holistic-cosine ignores alignment and returns the cosine distance of the
/// flattened features; its path is the positional diagonal with unit costs.
/// sliding-window returns the smallest mean of d(i, i+o) over offsets
/// |o| <= W - window_size, and an empty path.
AlignmentResult align(const FeatureSequence& x, const FeatureSequence& y, const AlignConfig& cfg);

/// Distance only; skips path reconstruction.
double image_distance(const FeatureSequence& x, const FeatureSequence& y, const AlignConfig& cfg);

}  // namespace vpralign
