#pragma once

// Shared data model: feature sequences, trajectories, distance grids,
// warping paths and the cosine point metric.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vpralign {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dot product with a fixed summation order (chunked, four lanes per chunk).
/// Every metric in the library goes through this so results are
/// reproducible regardless of which entry point computed them.
double dot(std::span<const double> x, std::span<const double> y);

/// Cosine distance 1 - x.y / (|x||y|).
///
/// Both norms zero gives 0, exactly one zero norm gives 1. The result is
/// clamped into [0, 2] to absorb rounding.
double point_distance(std::span<const double> x, std::span<const double> y);

/// Cosine distance from a precomputed dot product and squared norms.
double cosine_from_parts(double dot_xy, double sq_norm_x, double sq_norm_y);

/// One image: W local feature vectors of dimension D, stored contiguously
/// position-major. Squared norms are cached at construction; the object is immutable.
class FeatureSequence {
 public:
  FeatureSequence() = default;
  FeatureSequence(std::size_t width, std::size_t dim, std::vector<double> values,
                  std::string image_id = {});

  static FeatureSequence from_locals(const std::vector<std::vector<double>>& locals,
                                     std::string image_id = {});

  std::size_t width() const { return width_; }
  std::size_t dim() const { return dim_; }
  const std::string& image_id() const { return image_id_; }

  std::span<const double> local(std::size_t position) const {
    return {values_.data() + position * dim_, dim_};
  }
  double norm(std::size_t position) const { return std::sqrt(sq_norms_[position]); }
  double squared_norm(std::size_t position) const { return sq_norms_[position]; }
  std::span<const double> values() const { return values_; }
  /// Norm of the flattened W*D vector.
  double holistic_norm() const { return std::sqrt(holistic_sq_norm_); }
  double holistic_squared_norm() const { return holistic_sq_norm_; }

  bool same_shape(const FeatureSequence& other) const {
    return width_ == other.width_ && dim_ == other.dim_;
  }
  std::string shape_string() const;

 private:
  std::size_t width_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<double> sq_norms_;
  double holistic_sq_norm_ = 0.0;
  std::string image_id_;
};

/// Concatenation of all local vectors.
std::vector<double> flatten(const FeatureSequence& seq);

/// Temporally ordered frames sharing one (W, D) shape.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<FeatureSequence> frames);

  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  std::size_t width() const { return frames_.empty() ? 0 : frames_.front().width(); }
  std::size_t dim() const { return frames_.empty() ? 0 : frames_.front().dim(); }

  const FeatureSequence& operator[](std::size_t i) const { return frames_[i]; }
  const std::vector<FeatureSequence>& frames() const { return frames_; }

  /// Frames [first, first + count), clipped to the end.
  Trajectory slice(std::size_t first, std::size_t count) const;

 private:
  std::vector<FeatureSequence> frames_;
};

/// Non-owning row-major view into a grid of distances.
struct MatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t stride = 0;

  double operator()(std::size_t i, std::size_t j) const { return data[i * stride + j]; }

  MatrixView columns(std::size_t first, std::size_t count) const;
  MatrixView row_block(std::size_t first, std::size_t count) const;
};

/// Dense rows x cols grid. +infinity marks cells excluded by a band.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), cells_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return cells_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return cells_[i * cols_ + j]; }

  std::span<const double> cells() const { return cells_; }
  MatrixView view() const { return {cells_.data(), rows_, cols_, cols_}; }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> cells_;
};

struct GridPoint {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const GridPoint&) const = default;
};

/// Ordered (row, col) points, 0-based, with the cost charged at each point.
struct WarpingPath {
  std::vector<GridPoint> points;
  std::vector<double> costs;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double total_cost() const;
  bool operator==(const WarpingPath&) const = default;
};

/// Checks start (0,0), end (rows-1, end_col), unit monotone steps and the
/// length bounds. Returns a description of the first violation, if any.
std::optional<std::string> validate_path(const WarpingPath& path, std::size_t rows,
                                         std::size_t end_col);

struct AlignmentResult {
  double distance = 0.0;
  WarpingPath path;
  double cumulative = 0.0;
  double total_cost = 0.0;
  /// Diagonal weight used by the recurrence (1 outside adaptive mode).
  double weight = 1.0;
};

enum class AlignMode { adaptive, vanilla, holistic_cosine, sliding_window };

std::string_view to_string(AlignMode mode);
AlignMode parse_align_mode(std::string_view name);

struct AlignConfig {
  double sigma = 1.0;
  std::size_t xi = 3;
  AlignMode mode = AlignMode::adaptive;
  std::size_t window_size = 4;
  bool restricted = false;

  /// Throws ConfigError when the config cannot be used with width W.
  void validate(std::size_t width) const;
};

}  // namespace vpralign
