#include "vpralign/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vpralign {

std::string_view to_string(TemporalMode mode) {
  return mode == TemporalMode::single_image ? "single" : "sequence";
}

TemporalMode parse_temporal_mode(std::string_view name) {
  if (name == "single" || name == "single-image") return TemporalMode::single_image;
  if (name == "sequence") return TemporalMode::sequence;
  throw ConfigError("unknown temporal mode '" + std::string(name) + "'");
}

RunResult run_pipeline(DistanceMatrix image_distances, const PipelineConfig& cfg) {
  RunResult run;
  run.config = cfg;
  run.image_distances = std::move(image_distances);
  const DistanceMatrix& d = run.image_distances;
  const std::size_t n_query = d.rows();

  run.predictions.resize(n_query);
  for (std::size_t q = 0; q < n_query; ++q) run.predictions[q].query_index = q;
  if (d.cols() == 0) return run;

  if (cfg.temporal == TemporalMode::single_image) {
    for (std::size_t q = 0; q < n_query; ++q) {
      std::size_t best = 0;
      for (std::size_t r = 1; r < d.cols(); ++r) {
        if (d(q, r) < d(q, best)) best = r;
      }
      run.predictions[q].reference_index = best;
      run.predictions[q].distance = d(q, best);
    }
    return run;
  }

  cfg.retrieval.validate();
  const std::size_t l = cfg.retrieval.seq_len;
  if (n_query < l) return run;
  const MatrixView all = d.view();
  for (std::size_t first = 0; first + l <= n_query; ++first) {
    SearchResult found = search(all.row_block(first, l), cfg.retrieval);
    run.dp_cell_updates += found.dp_cell_updates;
    FramePrediction& p = run.predictions[first + l / 2];
    p.reference_index = found.best().midpoint();
    p.distance = found.best().distance;
    p.window = run.window_matches.size();
    run.window_matches.push_back({first, std::move(found.matches.front())});
  }
  return run;
}

RunResult run_pipeline(const Trajectory& reference, const Trajectory& query, const PipelineConfig& cfg) {
  return run_pipeline(image_distance_matrix(query, reference, cfg.image), cfg);
}

std::optional<Outcome> judge(const FramePrediction& prediction, const Truth& truth,
                             std::int64_t tolerance, double threshold) {
  if (!truth) return std::nullopt;
  const bool has_place = *truth >= 0;
  const bool positive = prediction.reference_index.has_value() && prediction.distance < threshold;
  if (!positive) return has_place ? Outcome::false_negative : Outcome::true_negative;
  if (!has_place) return Outcome::false_positive;
  const auto predicted = static_cast<std::int64_t>(*prediction.reference_index);
  const std::int64_t error = predicted > *truth ? predicted - *truth : *truth - predicted;
  return error <= tolerance ? Outcome::true_positive : Outcome::false_positive;
}

std::optional<Outcome> judge(const SequenceMatch& match, const Truth& truth, std::int64_t tolerance,
                             double threshold) {
  FramePrediction p;
  p.reference_index = match.midpoint();
  p.distance = match.distance;
  return judge(p, truth, tolerance, threshold);
}

std::vector<double> operating_thresholds(const std::vector<FramePrediction>& predictions) {
  std::vector<double> distances;
  for (const auto& p : predictions) {
    if (p.reference_index && std::isfinite(p.distance)) distances.push_back(p.distance);
  }
  std::sort(distances.begin(), distances.end());
  distances.erase(std::unique(distances.begin(), distances.end()), distances.end());
  std::vector<double> out{0.0};
  for (double v : distances) {
    const double above = std::nextafter(v, kInfinity);
    if (above > out.back()) out.push_back(above);
  }
  return out;
}

PrCurve f1_sweep(const std::vector<FramePrediction>& predictions, const std::vector<Truth>& truths,
                 const EvalProtocol& protocol) {
  if (predictions.size() != truths.size()) {
    throw ShapeError("f1_sweep: one truth entry is needed per prediction");
  }
  if (protocol.tolerance < 0) throw ConfigError("tolerance must be >= 0");
  std::vector<double> thresholds =
      protocol.thresholds.empty() ? operating_thresholds(predictions) : protocol.thresholds;
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw ConfigError("f1_sweep: thresholds must be sorted ascending");
  }

  PrCurve curve;
  for (const Truth& t : truths) {
    if (!t) ++curve.excluded;
  }
  for (double threshold : thresholds) {
    PrPoint pt;
    pt.threshold = threshold;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const auto outcome = judge(predictions[i], truths[i], protocol.tolerance, threshold);
      if (!outcome) continue;
      switch (*outcome) {
        case Outcome::true_positive: ++pt.tp; break;
        case Outcome::false_positive: ++pt.fp; break;
        case Outcome::false_negative: ++pt.fn; break;
        case Outcome::true_negative: ++pt.tn; break;
      }
    }
    pt.precision = pt.tp + pt.fp == 0 ? 1.0 : static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fp);
    pt.recall = pt.tp + pt.fn == 0 ? 0.0 : static_cast<double>(pt.tp) / static_cast<double>(pt.tp + pt.fn);
    pt.f1 = pt.precision + pt.recall == 0.0 ? 0.0
                                             : 2.0 * pt.precision * pt.recall / (pt.precision + pt.recall);
    curve.points.push_back(pt);
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (curve.points[i].f1 > curve.points[curve.best].f1) curve.best = i;
  }
  return curve;
}

CompensationResult compensate_boundaries(const RunResult& run, std::size_t seq_len) {
  CompensationResult out{run.predictions, false};
  if (run.window_matches.empty() || seq_len == 0) return out;

  const std::size_t half = seq_len / 2;
  const WindowMatch& head = run.window_matches.front();
  const WindowMatch& tail = run.window_matches.back();
  const std::size_t first_mid = head.first_query + half;
  const std::size_t last_mid = tail.first_query + half;

  auto fill = [&](FramePrediction& p, const WindowMatch& wm, std::size_t window_index) {
    const std::size_t offset = p.query_index - wm.first_query;
    for (const FramePair& pair : wm.match.frame_pairs) {
      if (pair.query == offset) {
        p.reference_index = pair.history;
        p.distance = wm.match.distance;
        p.compensated = true;
        p.window = window_index;
        return;
      }
    }
  };

  for (FramePrediction& p : out.predictions) {
    if (p.query_index < first_mid && p.query_index >= head.first_query) {
      fill(p, head, 0);
    } else if (p.query_index > last_mid && p.query_index < tail.first_query + seq_len) {
      fill(p, tail, run.window_matches.size() - 1);
    }
  }
  out.applied = true;
  return out;
}

std::vector<Truth> truths_for(const std::vector<FramePrediction>& predictions,
                              const std::vector<std::int64_t>& ground_truth) {
  std::vector<Truth> out;
  out.reserve(predictions.size());
  for (const auto& p : predictions) {
    if (p.query_index < ground_truth.size()) {
      out.emplace_back(ground_truth[p.query_index]);
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

PrCurve evaluate(const RunResult& run, const std::vector<std::int64_t>& ground_truth,
                 const EvalProtocol& protocol) {
  if (run.config.temporal == TemporalMode::sequence) {
    const auto compensated = compensate_boundaries(run, run.config.retrieval.seq_len);
    return f1_sweep(compensated.predictions, truths_for(compensated.predictions, ground_truth), protocol);
  }
  return f1_sweep(run.predictions, truths_for(run.predictions, ground_truth), protocol);
}

std::vector<AblationEntry> run_ablation(const Trajectory& reference, const Trajectory& query,
                                        const std::vector<std::int64_t>& ground_truth,
                                        const PipelineConfig& base, const EvalProtocol& protocol) {
  std::vector<AblationEntry> out;
  for (AlignMode mode : {AlignMode::holistic_cosine, AlignMode::sliding_window, AlignMode::vanilla,
                         AlignMode::adaptive}) {
    PipelineConfig cfg = base;
    cfg.image.mode = mode;
    const DistanceMatrix grid = image_distance_matrix(query, reference, cfg.image);
    for (TemporalMode temporal : {TemporalMode::single_image, TemporalMode::sequence}) {
      cfg.temporal = temporal;
      const RunResult run = run_pipeline(grid, cfg);
      AblationEntry entry;
      entry.image_mode = mode;
      entry.temporal = temporal;
      entry.curve = evaluate(run, ground_truth, protocol);
      entry.max_f1 = entry.curve.max_f1();
      out.push_back(std::move(entry));
    }
  }
  return out;
}

}  // namespace vpralign
