#include "vpralign/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vpralign/parallel.hpp"

namespace vpralign {

namespace {

thread_local DtwTables search_tables;

std::size_t window_length_for(std::size_t query_len, double beta) {
  return static_cast<std::size_t>(std::ceil(beta * static_cast<double>(query_len)));
}

void require_query_length(std::size_t l) {
  if (l < 2) {
    std::ostringstream msg;
    msg << "query sequence must have at least 2 frames, got " << l;
    throw ConfigError(msg.str());
  }
}

}  // namespace

std::size_t RetrievalConfig::window_length() const { return window_length_for(seq_len, beta); }

void RetrievalConfig::validate() const {
  require_query_length(seq_len);
  if (!(beta > 1.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and > 1");
}

LmDtwResult lm_dtw(MatrixView window, DtwTables& tables) {
  require_query_length(window.rows);
  if (window.cols == 0) throw ConfigError("lm_dtw: candidate window is empty");

  tables.accumulate(window, 1.0);
  const std::size_t last = window.rows - 1;
  LmDtwResult out;
  for (std::size_t x = 0; x < window.cols; ++x) {
    const double normalized = tables.cumulative(last, x) / tables.cost(last, x);
    if (normalized < out.distance || out.length == 0) {
      out.distance = normalized;
      out.length = x + 1;
    }
  }
  out.path = tables.backtrace(last, out.length - 1);
  out.cell_updates = tables.cell_updates();
  return out;
}

LmDtwResult lm_dtw(MatrixView window) {
  DtwTables tables;
  return lm_dtw(window, tables);
}

DistanceMatrix image_distance_matrix(const Trajectory& rows, const Trajectory& cols,
                                     const AlignConfig& image_cfg) {
  if (!rows.empty() && !cols.empty() && !rows[0].same_shape(cols[0])) {
    std::ostringstream msg;
    msg << "shape mismatch: query frames are " << rows[0].shape_string() << ", history frames are "
        << cols[0].shape_string();
    throw ShapeError(msg.str());
  }
  if (!rows.empty()) image_cfg.validate(rows.width());
  DistanceMatrix out(rows.size(), cols.size());
  // One history frame per task: it stays cache-resident across all query rows.
  parallel_for(cols.size(), [&](std::size_t h) {
    for (std::size_t q = 0; q < rows.size(); ++q) {
      out(q, h) = image_distance(rows[q], cols[h], image_cfg);
    }
  });
  return out;
}

LmDtwResult lm_dtw(const Trajectory& query, const Trajectory& window, const AlignConfig& image_cfg) {
  require_query_length(query.size());
  if (window.empty()) throw ConfigError("lm_dtw: candidate window is empty");
  const DistanceMatrix d = image_distance_matrix(query, window, image_cfg);
  return lm_dtw(d.view());
}

SearchResult search(MatrixView query_by_history, const RetrievalConfig& rcfg) {
  if (!(rcfg.beta > 1.0)) throw ConfigError("beta must be > 1");
  require_query_length(query_by_history.rows);
  const std::size_t n = query_by_history.cols;
  if (n == 0) throw ConfigError("search: history is empty");
  const std::size_t k = window_length_for(query_by_history.rows, rcfg.beta);

  SearchResult result;
  result.matches.resize(n);
  std::vector<std::uint64_t> cells(n, 0);
  parallel_for(n, [&](std::size_t start) {
    const MatrixView window = query_by_history.columns(start, k);
    LmDtwResult r = lm_dtw(window, search_tables);
    SequenceMatch& m = result.matches[start];
    m.start = start;
    m.length = r.length;
    m.distance = r.distance;
    cells[start] = r.cell_updates;
    m.frame_pairs.reserve(r.path.size());
    for (const GridPoint& p : r.path.points) m.frame_pairs.push_back({p.row, start + p.col});
    m.path = std::move(r.path);
  });
  for (std::uint64_t c : cells) result.dp_cell_updates += c;
  std::stable_sort(result.matches.begin(), result.matches.end(),
                   [](const SequenceMatch& a, const SequenceMatch& b) {
                     return a.distance < b.distance;
                   });
  return result;
}

SearchResult search(const Trajectory& query, const Trajectory& history,
                    const RetrievalConfig& rcfg, const AlignConfig& image_cfg) {
  require_query_length(query.size());
  if (history.empty()) throw ConfigError("search: history is empty");
  const DistanceMatrix d = image_distance_matrix(query, history, image_cfg);
  return search(d.view(), rcfg);
}

std::uint64_t expected_cell_updates(std::size_t history_len, const RetrievalConfig& rcfg) {
  const std::uint64_t k = rcfg.window_length();
  std::uint64_t cells = 0;
  for (std::uint64_t start = 0; start < history_len; ++start) {
    cells += std::min<std::uint64_t>(k, history_len - start);
  }
  return cells * rcfg.seq_len;
}

}  // namespace vpralign
