#include "vpralign/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dot_kernel.hpp"

namespace vpralign {

namespace {

void require_same_shape(const FeatureSequence& x, const FeatureSequence& y) {
  if (!x.same_shape(y)) {
    std::ostringstream msg;
    msg << "shape mismatch: X is " << x.shape_string() << ", Y is " << y.shape_string();
    throw ShapeError(msg.str());
  }
}

bool in_band(std::size_t i, std::size_t j, bool restricted, std::size_t xi) {
  if (!restricted) return true;
  const std::size_t gap = i > j ? i - j : j - i;
  return gap < xi;
}

double holistic_distance(const FeatureSequence& x, const FeatureSequence& y) {
  double cross = 0.0;
  for (std::size_t p = 0; p < x.width(); ++p) cross += dot(x.local(p), y.local(p));
  return cosine_from_parts(cross, x.holistic_squared_norm(), y.holistic_squared_norm());
}

double sliding_window_distance(const DistanceMatrix& d, std::size_t window_size) {
  const auto w = static_cast<std::ptrdiff_t>(d.rows());
  const std::ptrdiff_t reach = w - static_cast<std::ptrdiff_t>(window_size);
  double best = kInfinity;
  for (std::ptrdiff_t offset = -reach; offset <= reach; ++offset) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::ptrdiff_t i = 0; i < w; ++i) {
      const std::ptrdiff_t j = i + offset;
      if (j < 0 || j >= w) continue;
      sum += d(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      ++count;
    }
    best = std::min(best, sum / static_cast<double>(count));
  }
  return best;
}

thread_local DtwTables scratch_tables;

}  // namespace

DistanceMatrix build_distance_matrix(const FeatureSequence& x, const FeatureSequence& y,
                                     bool restricted, std::size_t xi) {
  require_same_shape(x, y);
  const std::size_t w = x.width();
  const std::size_t dim = x.dim();
  if (restricted && (xi < 1 || xi > w)) {
    std::ostringstream msg;
    msg << "xi must lie in [1, W=" << w << "], got " << xi;
    throw ConfigError(msg.str());
  }

  // Blocked over the feature dimension so each chunk of the 2W local vectors
  // stays cache-resident while every in-band cell consumes it. The per-cell
  // summation order matches dot().
  std::vector<double> cross(w * w, 0.0);
  const double* xs = x.values().data();
  const double* ys = y.values().data();
  for (std::size_t c = 0; c < dim; c += detail::kDotChunk) {
    const std::size_t len = std::min(detail::kDotChunk, dim - c);
    for (std::size_t i = 0; i < w; ++i) {
      const double* xi_chunk = xs + i * dim + c;
      for (std::size_t j = 0; j < w; ++j) {
        if (!in_band(i, j, restricted, xi)) continue;
        cross[i * w + j] += detail::dot_chunk(xi_chunk, ys + j * dim + c, len);
      }
    }
  }

  DistanceMatrix d(w, w, kInfinity);
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      if (!in_band(i, j, restricted, xi)) continue;
      d(i, j) = cosine_from_parts(cross[i * w + j], x.squared_norm(i), y.squared_norm(j));
    }
  }
  return d;
}

AdaptiveWeight adaptive_weight(const DistanceMatrix& d, double sigma) {
  const std::size_t w = d.rows();
  const std::size_t center = central_index(w);
  AdaptiveWeight out;
  double best = kInfinity;
  bool found = false;
  for (std::size_t j = 0; j < d.cols(); ++j) {
    const double v = d(center, j);
    if (!std::isfinite(v)) continue;
    if (!found || v < best) {
      best = v;
      out.best_index = j;
      found = true;
    }
  }
  if (!found) throw ConfigError("adaptive_weight: central row has no finite cell");
  const double offset = static_cast<double>(out.best_index > center ? out.best_index - center
                                                                    : center - out.best_index);
  out.a = std::sqrt(1.0 + sigma * offset);
  return out;
}

void DtwTables::accumulate(MatrixView d, double weight) {
  rows_ = d.rows;
  cols_ = d.cols;
  weight_ = weight;
  cell_updates_ = 0;
  const std::size_t n = rows_ * cols_;
  cumulative_.resize(n);
  cost_.resize(n);
  steps_.resize(n);

  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      const std::size_t at = i * cols_ + j;
      const double dij = d(i, j);
      if (i == 0 && j == 0) {
        cumulative_[at] = dij;
        cost_[at] = 1.0;
        steps_[at] = Step::start;
      } else if (i == 0) {
        cumulative_[at] = dij + cumulative_[at - 1];
        cost_[at] = cost_[at - 1] + 1.0;
        steps_[at] = Step::horizontal;
      } else if (j == 0) {
        cumulative_[at] = dij + cumulative_[at - cols_];
        cost_[at] = cost_[at - cols_] + 1.0;
        steps_[at] = Step::vertical;
      } else {
        const std::size_t diag_at = at - cols_ - 1;
        const double diag = weight * dij + cumulative_[diag_at];
        const double vert = dij + cumulative_[at - cols_];
        const double horiz = dij + cumulative_[at - 1];
        double best = diag;
        Step step = Step::diagonal;
        if (vert < best) {
          best = vert;
          step = Step::vertical;
        }
        if (horiz < best) {
          best = horiz;
          step = Step::horizontal;
        }
        cumulative_[at] = best;
        switch (step) {
          case Step::diagonal:
            if (diag < vert && diag < horiz) {
              step = Step::diagonal_weighted;
              cost_[at] = cost_[diag_at] + weight;
            } else {
              cost_[at] = cost_[diag_at] + 1.0;
            }
            break;
          case Step::vertical: cost_[at] = cost_[at - cols_] + 1.0; break;
          default: cost_[at] = cost_[at - 1] + 1.0; break;
        }
        steps_[at] = step;
      }
      ++cell_updates_;
    }
  }
}

WarpingPath DtwTables::backtrace(std::size_t end_row, std::size_t end_col) const {
  WarpingPath path;
  std::size_t i = end_row;
  std::size_t j = end_col;
  while (true) {
    const Step s = step(i, j);
    path.points.push_back({i, j});
    path.costs.push_back(s == Step::diagonal_weighted ? weight_ : 1.0);
    if (s == Step::start) break;
    if (s == Step::diagonal || s == Step::diagonal_weighted) {
      --i;
      --j;
    } else if (s == Step::vertical) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(path.points.begin(), path.points.end());
  std::reverse(path.costs.begin(), path.costs.end());
  return path;
}

AlignmentResult align(const FeatureSequence& x, const FeatureSequence& y, const AlignConfig& cfg) {
  require_same_shape(x, y);
  cfg.validate(x.width());
  const std::size_t w = x.width();
  AlignmentResult result;

  if (cfg.mode == AlignMode::holistic_cosine) {
    result.distance = holistic_distance(x, y);
    for (std::size_t p = 0; p < w; ++p) {
      result.path.points.push_back({p, p});
      result.path.costs.push_back(1.0);
    }
    result.total_cost = static_cast<double>(w);
    result.cumulative = result.distance * result.total_cost;
    return result;
  }

  const DistanceMatrix d = build_distance_matrix(x, y, cfg.restricted, cfg.xi);

  if (cfg.mode == AlignMode::sliding_window) {
    result.distance = sliding_window_distance(d, cfg.window_size);
    result.cumulative = result.distance;
    result.total_cost = 1.0;
    return result;
  }

  result.weight = cfg.mode == AlignMode::adaptive ? adaptive_weight(d, cfg.sigma).a : 1.0;
  DtwTables& tables = scratch_tables;
  tables.accumulate(d.view(), result.weight);
  result.cumulative = tables.cumulative(w - 1, w - 1);
  result.total_cost = tables.cost(w - 1, w - 1);
  result.distance = result.cumulative / result.total_cost;
  result.path = tables.backtrace(w - 1, w - 1);
  return result;
}

double image_distance(const FeatureSequence& x, const FeatureSequence& y, const AlignConfig& cfg) {
  require_same_shape(x, y);
  if (cfg.mode == AlignMode::holistic_cosine) {
    cfg.validate(x.width());
    return holistic_distance(x, y);
  }
  if (cfg.mode == AlignMode::sliding_window) return align(x, y, cfg).distance;
  cfg.validate(x.width());
  const std::size_t w = x.width();
  const DistanceMatrix d = build_distance_matrix(x, y, cfg.restricted, cfg.xi);
  const double weight = cfg.mode == AlignMode::adaptive ? adaptive_weight(d, cfg.sigma).a : 1.0;
  DtwTables& tables = scratch_tables;
  tables.accumulate(d.view(), weight);
  return tables.cumulative(w - 1, w - 1) / tables.cost(w - 1, w - 1);
}

}  // namespace vpralign
