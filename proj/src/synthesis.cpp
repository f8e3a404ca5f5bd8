#include "vpralign/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vpralign/random.hpp"

namespace vpralign {

namespace {

enum Stream : std::uint64_t {
  kReferenceStream = 1,
  kAliasStream = 2,
  kFillStream = 3,
  kNoiseStream = 4,
};

constexpr double kAliasJitter = 0.05;

std::vector<double> rectify(const std::vector<double>& latent) {
  std::vector<double> out(latent.size());
  std::transform(latent.begin(), latent.end(), out.begin(), [](double v) { return std::max(v, 0.0); });
  return out;
}

std::size_t query_frame_count(std::size_t n_frames, double speed_ratio) {
  std::size_t count = 0;
  while (std::llround(static_cast<double>(count) * speed_ratio) < static_cast<long long>(n_frames)) {
    ++count;
  }
  return count;
}

}  // namespace

void SynthSpec::validate() const {
  std::ostringstream msg;
  if (n_frames == 0) msg << "n_frames must be positive; ";
  if (width == 0 || dim == 0) msg << "W and D must be positive; ";
  if (shift >= width) msg << "shift must be < W; ";
  if (!(noise >= 0.0)) msg << "noise must be >= 0; ";
  if (!(speed_ratio > 0.0) || !std::isfinite(speed_ratio)) msg << "speed_ratio must be > 0; ";
  if (!(spatial_correlation >= 0.0 && spatial_correlation < 1.0)) {
    msg << "spatial_correlation must lie in [0, 1); ";
  }
  if (aliasing_pairs > 0 && n_frames < 4) msg << "aliasing needs at least 4 frames; ";
  const std::string problems = msg.str();
  if (!problems.empty()) throw ConfigError("invalid SynthSpec: " + problems);
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t w = spec.width;
  const std::size_t dim = spec.dim;
  const std::size_t n = spec.n_frames;
  const double fresh_share = std::sqrt(1.0 - kTemporalBlend * kTemporalBlend);
  const double rho = spec.spatial_correlation;
  const double rho_rest = std::sqrt(1.0 - rho * rho);

  SynthData data;

  RandomStream reference_rng(spec.seed, kReferenceStream);
  std::vector<std::vector<double>> ref_values;
  ref_values.reserve(n);
  std::vector<double> latent(w * dim, 0.0);
  std::vector<double> draw(w * dim);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t p = 0; p < w; ++p) {
      for (std::size_t c = 0; c < dim; ++c) {
        const double e = reference_rng.normal();
        draw[p * dim + c] = p == 0 ? e : rho * draw[(p - 1) * dim + c] + rho_rest * e;
      }
    }
    for (std::size_t i = 0; i < latent.size(); ++i) {
      latent[i] = t == 0 ? draw[i] : kTemporalBlend * latent[i] + fresh_share * draw[i];
    }
    ref_values.push_back(rectify(latent));
  }

  if (n > 1) {
    double sum = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
      for (std::size_t p = 0; p < w; ++p) {
        sum += point_distance({ref_values[t - 1].data() + p * dim, dim},
                              {ref_values[t].data() + p * dim, dim});
      }
    }
    data.adjacent_distance = sum / static_cast<double>((n - 1) * w);
  }

  RandomStream alias_rng(spec.seed, kAliasStream);
  for (std::size_t a = 0; a < spec.aliasing_pairs; ++a) {
    const std::size_t source = alias_rng.below(n);
    const std::size_t span = std::max<std::size_t>(1, n / 2);
    const std::size_t overwritten = (source + n / 4 + alias_rng.below(span)) % n;
    std::vector<double> copy = ref_values[source];
    for (double& v : copy) v = std::max(v * (1.0 + kAliasJitter * alias_rng.normal()), 0.0);
    ref_values[overwritten] = std::move(copy);
    data.aliases.push_back({source, overwritten});
  }

  std::vector<FeatureSequence> reference;
  reference.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    reference.emplace_back(w, dim, std::move(ref_values[t]), "ref-" + std::to_string(t));
  }

  RandomStream fill_rng(spec.seed, kFillStream);
  RandomStream noise_rng(spec.seed, kNoiseStream);
  const std::size_t n_query = query_frame_count(n, spec.speed_ratio);
  std::vector<FeatureSequence> query;
  query.reserve(n_query);
  data.ground_truth.reserve(n_query);
  for (std::size_t q = 0; q < n_query; ++q) {
    const auto t = static_cast<std::size_t>(std::llround(static_cast<double>(q) * spec.speed_ratio));
    const std::span<const double> src = reference[t].values();
    std::vector<double> values(w * dim);
    for (std::size_t p = 0; p < w; ++p) {
      for (std::size_t c = 0; c < dim; ++c) {
        values[p * dim + c] = p + spec.shift < w ? src[(p + spec.shift) * dim + c]
                                                 : std::max(fill_rng.normal(), 0.0);
      }
    }
    if (spec.noise > 0.0) {
      for (double& v : values) v = std::max(v * (1.0 + spec.noise * noise_rng.normal()), 0.0);
    }
    query.emplace_back(w, dim, std::move(values), "query-" + std::to_string(q));
    data.ground_truth.push_back(static_cast<std::int64_t>(t));
  }

  data.reference = Trajectory(std::move(reference));
  data.query = Trajectory(std::move(query));
  return data;
}

PlantedHistory plant_copies(const Trajectory& history, const Trajectory& query,
                            const std::vector<std::size_t>& offsets,
                            const std::vector<double>& ratios) {
  if (offsets.size() != ratios.size()) throw ConfigError("plant_copies: offsets and ratios differ in size");
  if (query.empty()) throw ConfigError("plant_copies: empty query");
  if (!history.empty() && !history[0].same_shape(query[0])) {
    throw ShapeError("plant_copies: history and query shapes differ");
  }
  std::vector<FeatureSequence> frames = history.frames();
  std::vector<bool> used(frames.size(), false);
  PlantedHistory out;
  const double last = static_cast<double>(query.size() - 1);
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (!(ratios[i] > 0.0)) throw ConfigError("plant_copies: ratio must be > 0");
    const auto length = static_cast<std::size_t>(std::llround(last * ratios[i])) + 1;
    if (offsets[i] + length > frames.size()) throw ConfigError("plant_copies: plant runs past the history");
    for (std::size_t j = 0; j < length; ++j) {
      if (used[offsets[i] + j]) throw ConfigError("plant_copies: plants overlap");
      used[offsets[i] + j] = true;
      const auto src = std::min<std::size_t>(
          query.size() - 1, static_cast<std::size_t>(std::llround(static_cast<double>(j) / ratios[i])));
      frames[offsets[i] + j] = query[src];
    }
    out.plants.push_back({offsets[i], length});
  }
  out.history = Trajectory(std::move(frames));
  return out;
}

}  // namespace vpralign
