#include "vpralign/projection.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "vpralign/random.hpp"

namespace vpralign {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Frames per GEMM batch; keeps the stacked input near 40 MB at D = 10416.
constexpr std::size_t kBatchRows = 512;

void require_dim(const FeatureSequence& seq, const ProjectionSpec& spec) {
  if (seq.dim() != spec.source_dim) {
    std::ostringstream msg;
    msg << "projection expects D=" << spec.source_dim << " but sequence is " << seq.shape_string();
    throw ShapeError(msg.str());
  }
}

}  // namespace

void ProjectionSpec::validate() const {
  if (source_dim == 0 || target_dim == 0) throw ConfigError("projection dims must be positive");
  if (target_dim > source_dim) {
    std::ostringstream msg;
    msg << "projection target_dim " << target_dim << " exceeds source_dim " << source_dim;
    throw ConfigError(msg.str());
  }
  if (identity && target_dim != source_dim) {
    throw ConfigError("identity projection requires target_dim == source_dim");
  }
}

GaussianProjection::GaussianProjection(const ProjectionSpec& spec) : spec_(spec) {
  spec_.validate();
  if (spec_.identity) return;
  const CounterRng rng(spec_.seed, kProjectionStream);
  const double root = std::sqrt(static_cast<double>(spec_.target_dim));
  matrix_.resize(spec_.target_dim * spec_.source_dim);
  for (std::size_t e = 0; e < matrix_.size(); ++e) matrix_[e] = rng.normal(e) / root;
}

void GaussianProjection::project_rows(const double* in, std::size_t rows, double* out) const {
  const auto source = static_cast<Eigen::Index>(spec_.source_dim);
  const auto target = static_cast<Eigen::Index>(spec_.target_dim);
  Eigen::Map<const RowMatrix> x(in, static_cast<Eigen::Index>(rows), source);
  Eigen::Map<const RowMatrix> p(matrix_.data(), target, source);
  Eigen::Map<RowMatrix> y(out, static_cast<Eigen::Index>(rows), target);
  y.noalias() = x * p.transpose();
}

FeatureSequence GaussianProjection::apply(const FeatureSequence& seq) const {
  require_dim(seq, spec_);
  if (spec_.identity) return seq;
  std::vector<double> out(seq.width() * spec_.target_dim);
  project_rows(seq.values().data(), seq.width(), out.data());
  return FeatureSequence(seq.width(), spec_.target_dim, std::move(out), seq.image_id());
}

Trajectory GaussianProjection::apply(const Trajectory& frames) const {
  if (frames.empty()) return frames;
  require_dim(frames[0], spec_);
  if (spec_.identity) return frames;

  const std::size_t w = frames.width();
  const std::size_t source = spec_.source_dim;
  const std::size_t target = spec_.target_dim;
  const std::size_t per_batch = std::max<std::size_t>(1, kBatchRows / w);

  std::vector<FeatureSequence> out;
  out.reserve(frames.size());
  std::vector<double> stacked;
  std::vector<double> projected;
  for (std::size_t first = 0; first < frames.size(); first += per_batch) {
    const std::size_t count = std::min(per_batch, frames.size() - first);
    stacked.resize(count * w * source);
    projected.resize(count * w * target);
    for (std::size_t f = 0; f < count; ++f) {
      const auto values = frames[first + f].values();
      std::copy(values.begin(), values.end(), stacked.begin() + static_cast<std::ptrdiff_t>(f * w * source));
    }
    project_rows(stacked.data(), count * w, projected.data());
    for (std::size_t f = 0; f < count; ++f) {
      auto begin = projected.begin() + static_cast<std::ptrdiff_t>(f * w * target);
      out.emplace_back(w, target, std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(w * target)),
                       frames[first + f].image_id());
    }
  }
  return Trajectory(std::move(out));
}

FeatureSequence project(const FeatureSequence& seq, const ProjectionSpec& spec) {
  return GaussianProjection(spec).apply(seq);
}

Trajectory project(const Trajectory& frames, const ProjectionSpec& spec) {
  return GaussianProjection(spec).apply(frames);
}

}  // namespace vpralign
