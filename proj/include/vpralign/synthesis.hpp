#pragma once

// Synthetic feature trajectories with controllable viewpoint shift,
// appearance noise, speed change and perceptual aliasing.
//
// Reference frames come from a latent Gaussian field that is blended over
// time, z_t = 0.7 z_{t-1} + sqrt(1 - 0.49) f_t, optionally correlated across
// positions, then rectified. Query frame t' observes reference frame
// round(t' * speed_ratio) with its local features moved `shift` positions to
// the left; the vacated positions get fresh rectified draws. Every query
// entry is multiplied by (1 + noise * N(0,1)) and clamped at 0.

#include <cstdint>
#include <vector>

#include "vpralign/core.hpp"

namespace vpralign {

inline constexpr double kTemporalBlend = 0.7;

struct SynthSpec {
  std::size_t n_frames = 200;
  std::size_t width = 7;
  std::size_t dim = 64;
  std::size_t shift = 0;
  double noise = 0.0;
  double speed_ratio = 1.0;
  std::size_t aliasing_pairs = 0;
  std::uint64_t seed = 0;
  /// Correlation between neighbouring positions of the latent field.
  double spatial_correlation = 0.0;

  void validate() const;
};

struct AliasPair {
  std::size_t source = 0;
  std::size_t overwritten = 0;
};

struct SynthData {
  Trajectory reference;
  Trajectory query;
  /// Reference index observed by each query frame (non-decreasing).
  std::vector<std::int64_t> ground_truth;
  std::vector<AliasPair> aliases;
  /// Mean cosine distance between the same position of consecutive
  /// reference frames, measured before aliasing.
  double adjacent_distance = 0.0;
};

SynthData generate(const SynthSpec& spec);

struct Plant {
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct PlantedHistory {
  Trajectory history;
  std::vector<Plant> plants;
};

/// Overwrites history frames with time-warped copies of `query`: the copy at
/// offsets[i] spans round((l - 1) * ratios[i]) + 1 frames and frame j of it is
/// query[round(j / ratios[i])]. Plants must not overlap or run off the end.
PlantedHistory plant_copies(const Trajectory& history, const Trajectory& query,
                            const std::vector<std::size_t>& offsets,
                            const std::vector<double>& ratios);

}  // namespace vpralign
