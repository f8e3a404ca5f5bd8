#include "vpralign/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dot_kernel.hpp"

namespace vpralign {

using detail::dot_chunk;
using detail::kDotChunk;

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  double total = 0.0;
  for (std::size_t c = 0; c < n; c += kDotChunk) {
    total += dot_chunk(x.data() + c, y.data() + c, std::min(kDotChunk, n - c));
  }
  return total;
}

double cosine_from_parts(double dot_xy, double sq_norm_x, double sq_norm_y) {
  if (sq_norm_x == 0.0 && sq_norm_y == 0.0) return 0.0;
  if (sq_norm_x == 0.0 || sq_norm_y == 0.0) return 1.0;
  // sqrt(s * s) == s exactly, so identical inputs give exactly 0.
  const double d = 1.0 - dot_xy / std::sqrt(sq_norm_x * sq_norm_y);
  return std::clamp(d, 0.0, 2.0);
}

double point_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    std::ostringstream msg;
    msg << "point_distance: dimension mismatch (" << x.size() << " vs " << y.size() << ")";
    throw ShapeError(msg.str());
  }
  return cosine_from_parts(dot(x, y), dot(x, x), dot(y, y));
}

FeatureSequence::FeatureSequence(std::size_t width, std::size_t dim,
                                 std::vector<double> values, std::string image_id)
    : width_(width), dim_(dim), values_(std::move(values)), image_id_(std::move(image_id)) {
  if (width_ == 0 || dim_ == 0) {
    throw ShapeError("FeatureSequence: W and D must both be at least 1");
  }
  if (values_.size() != width_ * dim_) {
    std::ostringstream msg;
    msg << "FeatureSequence: expected " << width_ * dim_ << " values for " << shape_string()
        << ", got " << values_.size();
    throw ShapeError(msg.str());
  }
  sq_norms_.resize(width_);
  holistic_sq_norm_ = 0.0;
  for (std::size_t p = 0; p < width_; ++p) {
    sq_norms_[p] = dot(local(p), local(p));
    holistic_sq_norm_ += sq_norms_[p];
  }
}

FeatureSequence FeatureSequence::from_locals(const std::vector<std::vector<double>>& locals,
                                             std::string image_id) {
  if (locals.empty()) throw ShapeError("FeatureSequence: no local features");
  const std::size_t dim = locals.front().size();
  std::vector<double> values;
  values.reserve(locals.size() * dim);
  for (const auto& v : locals) {
    if (v.size() != dim) throw ShapeError("FeatureSequence: ragged local features");
    values.insert(values.end(), v.begin(), v.end());
  }
  return FeatureSequence(locals.size(), dim, std::move(values), std::move(image_id));
}

std::string FeatureSequence::shape_string() const {
  std::ostringstream out;
  out << "(W=" << width_ << ", D=" << dim_ << ")";
  return out.str();
}

std::vector<double> flatten(const FeatureSequence& seq) {
  return {seq.values().begin(), seq.values().end()};
}

Trajectory::Trajectory(std::vector<FeatureSequence> frames) : frames_(std::move(frames)) {
  for (std::size_t t = 1; t < frames_.size(); ++t) {
    if (!frames_[t].same_shape(frames_.front())) {
      std::ostringstream msg;
      msg << "Trajectory: frame " << t << " has shape " << frames_[t].shape_string()
          << " but frame 0 has " << frames_.front().shape_string();
      throw ShapeError(msg.str());
    }
  }
}

Trajectory Trajectory::slice(std::size_t first, std::size_t count) const {
  first = std::min(first, frames_.size());
  const std::size_t last = std::min(frames_.size(), first + count);
  return Trajectory(std::vector<FeatureSequence>(frames_.begin() + static_cast<std::ptrdiff_t>(first),
                                                 frames_.begin() + static_cast<std::ptrdiff_t>(last)));
}

MatrixView MatrixView::columns(std::size_t first, std::size_t count) const {
  first = std::min(first, cols);
  return {data + first, rows, std::min(count, cols - first), stride};
}

MatrixView MatrixView::row_block(std::size_t first, std::size_t count) const {
  first = std::min(first, rows);
  return {data + first * stride, std::min(count, rows - first), cols, stride};
}

double WarpingPath::total_cost() const {
  double sum = 0.0;
  for (double c : costs) sum += c;
  return sum;
}

std::optional<std::string> validate_path(const WarpingPath& path, std::size_t rows,
                                         std::size_t end_col) {
  const auto& pts = path.points;
  if (pts.empty()) return "empty path";
  if (path.costs.size() != pts.size()) return "cost count differs from point count";
  if (!(pts.front() == GridPoint{0, 0})) return "path does not start at (0,0)";
  if (!(pts.back() == GridPoint{rows - 1, end_col})) return "path does not end at the endpoint";
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const std::size_t di = pts[k].row - pts[k - 1].row;
    const std::size_t dj = pts[k].col - pts[k - 1].col;
    const bool ok = pts[k].row >= pts[k - 1].row && pts[k].col >= pts[k - 1].col && di <= 1 &&
                    dj <= 1 && (di + dj) >= 1;
    if (!ok) {
      std::ostringstream msg;
      msg << "invalid step at point " << k;
      return msg.str();
    }
  }
  const std::size_t cols = end_col + 1;
  if (pts.size() < std::max(rows, cols) || pts.size() > rows + cols - 1) {
    return "path length outside [max(rows,cols), rows+cols-1]";
  }
  return std::nullopt;
}

std::string_view to_string(AlignMode mode) {
  switch (mode) {
    case AlignMode::adaptive: return "adaptive";
    case AlignMode::vanilla: return "vanilla";
    case AlignMode::holistic_cosine: return "holistic-cosine";
    case AlignMode::sliding_window: return "sliding-window";
  }
  return "unknown";
}

AlignMode parse_align_mode(std::string_view name) {
  if (name == "adaptive") return AlignMode::adaptive;
  if (name == "vanilla") return AlignMode::vanilla;
  if (name == "holistic-cosine" || name == "holistic") return AlignMode::holistic_cosine;
  if (name == "sliding-window" || name == "sliding") return AlignMode::sliding_window;
  throw ConfigError("unknown alignment mode '" + std::string(name) + "'");
}

void AlignConfig::validate(std::size_t width) const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("sigma must be finite and >= 0");
  if (restricted && (xi < 1 || xi > width)) {
    std::ostringstream msg;
    msg << "xi must lie in [1, W=" << width << "], got " << xi;
    throw ConfigError(msg.str());
  }
  if (mode == AlignMode::sliding_window && (window_size < 1 || window_size > width)) {
    std::ostringstream msg;
    msg << "window_size must lie in [1, W=" << width << "], got " << window_size;
    throw ConfigError(msg.str());
  }
}

}  // namespace vpralign
