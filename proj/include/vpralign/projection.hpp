#pragma once

// Gaussian random projection of local features.
//
// Entry (r, c) of the target x source matrix is normal number r*source + c
// of CounterRng(seed, kProjectionStream), divided by sqrt(target). One
// matrix serves every position of every frame.

#include <cstdint>
#include <vector>

#include "vpralign/core.hpp"

namespace vpralign {

inline constexpr std::uint64_t kProjectionStream = 0x475250;  // "GRP"

struct ProjectionSpec {
  std::size_t source_dim = 0;
  std::size_t target_dim = 512;
  std::uint64_t seed = 0;
  /// Pass-through (target_dim must equal source_dim). Testing aid.
  bool identity = false;

  void validate() const;
};

class GaussianProjection {
 public:
  explicit GaussianProjection(const ProjectionSpec& spec);

  const ProjectionSpec& spec() const { return spec_; }
  /// Row-major target_dim x source_dim entries (empty for identity).
  const std::vector<double>& matrix() const { return matrix_; }

  FeatureSequence apply(const FeatureSequence& seq) const;
  Trajectory apply(const Trajectory& frames) const;

 private:
  void project_rows(const double* in, std::size_t rows, double* out) const;

  ProjectionSpec spec_;
  std::vector<double> matrix_;
};

FeatureSequence project(const FeatureSequence& seq, const ProjectionSpec& spec);
Trajectory project(const Trajectory& frames, const ProjectionSpec& spec);

}  // namespace vpralign
