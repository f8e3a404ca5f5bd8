#pragma once

// Tolerance-based scoring of retrieval runs and the ablation pipelines.
//
// A query is predicted positive when its distance is below the threshold.
// A positive is a true positive when the query has a true place and the
// predicted reference frame lies within `tolerance` frames of it; any other
// positive is a false positive. Negatives are false negatives when a true
// place exists and true negatives otherwise. Queries without ground truth
// are not counted.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vpralign/core.hpp"
#include "vpralign/temporal.hpp"

namespace vpralign {

enum class TemporalMode { single_image, sequence };

std::string_view to_string(TemporalMode mode);
TemporalMode parse_temporal_mode(std::string_view name);

struct PipelineConfig {
  AlignConfig image;
  TemporalMode temporal = TemporalMode::sequence;
  RetrievalConfig retrieval;
};

/// Reference index observed by a query frame: -1 means the place is absent
/// from the reference, nullopt means no ground truth was recorded.
using Truth = std::optional<std::int64_t>;
inline constexpr std::int64_t kNoTrueMatch = -1;

struct FramePrediction {
  std::size_t query_index = 0;
  std::optional<std::size_t> reference_index;
  double distance = kInfinity;
  /// Filled in by boundary compensation rather than by a window midpoint.
  bool compensated = false;
  /// Index into RunResult::window_matches when produced by sequence matching.
  std::optional<std::size_t> window = std::nullopt;
};

struct WindowMatch {
  std::size_t first_query = 0;
  SequenceMatch match;
};

struct RunResult {
  PipelineConfig config;
  std::vector<FramePrediction> predictions;
  std::vector<WindowMatch> window_matches;
  DistanceMatrix image_distances;
  std::uint64_t dp_cell_updates = 0;
};

/// Query-by-reference image distances, then either per-frame argmin
/// (single_image) or one search() per full query window with the prediction
/// placed at the window's midpoint frame first_query + floor(l / 2).
/// Both modes share this code path and differ only in config.
RunResult run_pipeline(const Trajectory& reference, const Trajectory& query, const PipelineConfig& cfg);

/// Same as run_pipeline on an already computed query-by-reference grid.
RunResult run_pipeline(DistanceMatrix image_distances, const PipelineConfig& cfg);

enum class Outcome { true_positive, false_positive, false_negative, true_negative };

std::optional<Outcome> judge(const FramePrediction& prediction, const Truth& truth,
                             std::int64_t tolerance, double threshold);

/// judge() for a sequence match whose query window midpoint has `truth`;
/// the predicted frame is the match midpoint.
std::optional<Outcome> judge(const SequenceMatch& match, const Truth& truth, std::int64_t tolerance,
                             double threshold);

struct EvalProtocol {
  std::int64_t tolerance = 3;
  /// Ascending; empty means operating_thresholds() of the predictions.
  std::vector<double> thresholds;
};

struct PrPoint {
  double threshold = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 1.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;
  std::size_t best = 0;
  /// Queries left out for lack of ground truth.
  std::size_t excluded = 0;

  const PrPoint& best_point() const { return points.at(best); }
  double max_f1() const { return points.empty() ? 0.0 : best_point().f1; }
};

/// Thresholds that realise every distinct operating point: 0, then the
/// next representable value above each distinct finite distance.
std::vector<double> operating_thresholds(const std::vector<FramePrediction>& predictions);

/// Precision (1 when nothing is accepted), recall and F1 per threshold.
/// truths[i] belongs to the query frame predictions[i].query_index.
PrCurve f1_sweep(const std::vector<FramePrediction>& predictions, const std::vector<Truth>& truths,
                 const EvalProtocol& protocol);

/// Fills the query frames that no window midpoint covers. A frame inside the
/// first (last) window takes the history frame the matched path aligns it to,
/// and that window's distance. Interior frames are left unchanged. Returns
/// the input untouched, with `applied` false, when there is no window.
struct CompensationResult {
  std::vector<FramePrediction> predictions;
  bool applied = false;
};
CompensationResult compensate_boundaries(const RunResult& run, std::size_t seq_len);

/// Truth lookup for every query frame from a dense ground-truth vector.
std::vector<Truth> truths_for(const std::vector<FramePrediction>& predictions,
                              const std::vector<std::int64_t>& ground_truth);

struct AblationEntry {
  AlignMode image_mode = AlignMode::adaptive;
  TemporalMode temporal = TemporalMode::sequence;
  double max_f1 = 0.0;
  PrCurve curve;
};

/// Every image mode crossed with both temporal modes, sharing one image
/// distance grid per image mode. Boundary compensation is applied to
/// sequence runs.
std::vector<AblationEntry> run_ablation(const Trajectory& reference, const Trajectory& query,
                                        const std::vector<std::int64_t>& ground_truth,
                                        const PipelineConfig& base, const EvalProtocol& protocol);

/// Compensation (sequence runs only), truth lookup and f1_sweep.
PrCurve evaluate(const RunResult& run, const std::vector<std::int64_t>& ground_truth,
                 const EvalProtocol& protocol);

}  // namespace vpralign
