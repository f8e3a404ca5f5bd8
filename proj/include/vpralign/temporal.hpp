#pragma once

// Subsequence retrieval with a relaxed-endpoint DTW (LM-DTW).
//
// For a query C of length l and a candidate window T' of k history frames,
// the l x k grid of image distances is accumulated with unit diagonal weight.
// Every path cost is then 1, so cost(l-1, x) is the point count of the
// optimal path to (l-1, x). The match length m is the x minimising
// cumulative(l-1, x) / cost(l-1, x), smallest x on ties.
//
// search() evaluates every start frame of the history against one shared
// query-by-history grid, truncating windows that run past the end.

#include <cstdint>
#include <vector>

#include "vpralign/core.hpp"
#include "vpralign/spatial.hpp"

namespace vpralign {

struct RetrievalConfig {
  std::size_t seq_len = 20;
  double beta = 2.0;
  double threshold = kInfinity;

  /// ceil(beta * seq_len).
  std::size_t window_length() const;
  void validate() const;
};

struct FramePair {
  std::size_t query = 0;
  std::size_t history = 0;
  bool operator==(const FramePair&) const = default;
};

struct SequenceMatch {
  /// 0-based history index of the first frame of the match.
  std::size_t start = 0;
  /// Recovered length m (number of history frames covered).
  std::size_t length = 0;
  double distance = kInfinity;
  /// Path in window coordinates: (query frame, offset from start).
  WarpingPath path;
  /// Same path in absolute frame indices.
  std::vector<FramePair> frame_pairs;

  /// History frame at the middle of the match, start + floor(m / 2).
  std::size_t midpoint() const { return start + length / 2; }
  bool operator==(const SequenceMatch&) const = default;
};

struct LmDtwResult {
  std::size_t length = 0;
  double distance = kInfinity;
  WarpingPath path;
  std::uint64_t cell_updates = 0;
};

/// LM-DTW over a precomputed l x k grid of image distances.
LmDtwResult lm_dtw(MatrixView window, DtwTables& tables);
LmDtwResult lm_dtw(MatrixView window);

/// Builds the l x k grid with align() and runs LM-DTW on it.
LmDtwResult lm_dtw(const Trajectory& query, const Trajectory& window, const AlignConfig& image_cfg);

/// rows x cols grid of image distances, evaluated in parallel over columns.
DistanceMatrix image_distance_matrix(const Trajectory& rows, const Trajectory& cols,
                                     const AlignConfig& image_cfg);

struct SearchResult {
  /// One match per start frame, ascending by distance (then by start).
  std::vector<SequenceMatch> matches;
  /// DP cell updates summed over every LM-DTW run.
  std::uint64_t dp_cell_updates = 0;

  const SequenceMatch& best() const { return matches.front(); }
};

/// Runs LM-DTW at every start frame of an l x n query-by-history grid.
SearchResult search(MatrixView query_by_history, const RetrievalConfig& rcfg);

/// Computes the l x n grid with image_cfg and searches it.
SearchResult search(const Trajectory& query, const Trajectory& history,
                    const RetrievalConfig& rcfg, const AlignConfig& image_cfg);

/// Cell updates search() performs for history length n:
/// seq_len * sum over starts of min(k, n - start).
std::uint64_t expected_cell_updates(std::size_t history_len, const RetrievalConfig& rcfg);

}  // namespace vpralign
