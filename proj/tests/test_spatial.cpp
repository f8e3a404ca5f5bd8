#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "vpralign/spatial.hpp"

using namespace vpralign;

namespace {

double dtw_distance(const oracle::Grid& g, double a, DtwTables& tables) {
  const DistanceMatrix m = oracle::to_matrix(g);
  tables.accumulate(m.view(), a);
  const std::size_t w = g.size();
  return tables.cumulative(w - 1, w - 1) / tables.cost(w - 1, w - 1);
}

// Y is X with its local features moved `shift` positions left; the vacated
// right-hand slots get fresh features.
FeatureSequence shifted_copy(const FeatureSequence& x, std::size_t shift, std::mt19937_64& rng) {
  const FeatureSequence fill = oracle::random_sequence(rng, x.width(), x.dim());
  std::vector<double> v(x.width() * x.dim());
  for (std::size_t p = 0; p < x.width(); ++p) {
    const auto src = p + shift < x.width() ? x.local(p + shift) : fill.local(p);
    std::copy(src.begin(), src.end(), v.begin() + static_cast<std::ptrdiff_t>(p * x.dim()));
  }
  return FeatureSequence(x.width(), x.dim(), std::move(v));
}

}  // namespace

TEST_CASE("distance matrix of a sequence with itself has a zero diagonal") {
  std::mt19937_64 rng(1);
  const auto x = oracle::random_sequence(rng, 7, 32);
  const auto d = build_distance_matrix(x, x, false, 3);
  for (std::size_t i = 0; i < 7; ++i) CHECK(d(i, i) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("distance matrix cells match the point metric") {
  std::mt19937_64 rng(2);
  const auto x = oracle::random_sequence(rng, 5, 300);
  const auto y = oracle::random_sequence(rng, 5, 300);
  const auto d = build_distance_matrix(x, y, false, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) CHECK(d(i, j) == point_distance(x.local(i), y.local(j)));
  }
}

TEST_CASE("restricted band sentinels at W=7, xi=3 match an enumeration") {
  std::mt19937_64 rng(3);
  const auto x = oracle::random_sequence(rng, 7, 8);
  const auto y = oracle::random_sequence(rng, 7, 8);
  const auto d = build_distance_matrix(x, y, true, 3);
  std::size_t above = 0, below = 0, expected_above = 0, expected_below = 0;
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      const bool outside = (i > j ? i - j : j - i) >= 3;
      if (outside && j > i) ++expected_above;
      if (outside && i > j) ++expected_below;
      if (std::isinf(d(i, j))) (j > i ? above : below) += 1;
      if (!outside) CHECK(std::isfinite(d(i, j)));
    }
  }
  // Offsets 3..6 hold 4 + 3 + 2 + 1 cells on each side.
  CHECK(expected_above == 10);
  CHECK(expected_below == 10);
  CHECK(above == expected_above);
  CHECK(below == expected_below);
}

TEST_CASE("a band as wide as the sequence changes nothing") {
  std::mt19937_64 rng(4);
  const auto x = oracle::random_sequence(rng, 7, 16);
  const auto y = oracle::random_sequence(rng, 7, 16);
  CHECK(build_distance_matrix(x, y, true, 7) == build_distance_matrix(x, y, false, 3));
}

TEST_CASE("shape mismatch names both shapes") {
  std::mt19937_64 rng(5);
  const auto x = oracle::random_sequence(rng, 7, 16);
  const auto y = oracle::random_sequence(rng, 7, 8);
  try {
    build_distance_matrix(x, y, false, 3);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    CHECK(what.find("D=16") != std::string::npos);
    CHECK(what.find("D=8") != std::string::npos);
  }
  CHECK_THROWS_AS(align(x, y, AlignConfig{}), ShapeError);
}

TEST_CASE("adaptive weight examples") {
  DistanceMatrix d(7, 7, 0.5);
  d(3, 3) = 0.1;
  CHECK(adaptive_weight(d, 1.0).a == 1.0);
  CHECK(adaptive_weight(d, 1.0).best_index == 3);

  d(3, 0) = 0.05;
  CHECK(adaptive_weight(d, 1.0).a == 2.0);
  CHECK(adaptive_weight(d, 0.0).a == 1.0);
  CHECK(adaptive_weight(d, 2.0).a == doctest::Approx(std::sqrt(7.0)));

  d(3, 6) = 0.05;
  CHECK(adaptive_weight(d, 1.0).best_index == 0);
}

TEST_CASE("adaptive weight skips sentinel cells and rejects an empty central row") {
  DistanceMatrix d(5, 5, 0.9);
  d(2, 0) = kInfinity;
  d(2, 4) = 0.1;
  CHECK(adaptive_weight(d, 1.0).best_index == 4);
  for (std::size_t j = 0; j < 5; ++j) d(2, j) = kInfinity;
  CHECK_THROWS_AS(adaptive_weight(d, 1.0), ConfigError);
}

TEST_CASE("adaptive weight matches a direct recomputation") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t w = 2 + rng() % 8;
    const auto g = oracle::random_grid(rng, w, w);
    CHECK(adaptive_weight(oracle::to_matrix(g), 1.5).a == doctest::Approx(oracle::adaptive_weight(g, 1.5)));
  }
}

TEST_CASE("two by two grid with unit weight") {
  const oracle::Grid g{{0.2, 0.9}, {0.9, 0.1}};
  DtwTables t;
  CHECK(dtw_distance(g, 1.0, t) == doctest::Approx(0.15));
  CHECK(t.cumulative(1, 1) == doctest::Approx(0.3));
  CHECK(t.cost(1, 1) == 2.0);
  const WarpingPath p = t.backtrace(1, 1);
  CHECK(p.points == std::vector<GridPoint>{{0, 0}, {1, 1}});

  int paths = 0;
  oracle::enumerate_paths(g, 1, 1, 1.0, [&](double, const auto&) { ++paths; });
  CHECK(paths == 3);
  CHECK(oracle::best_path(g, 1, 1, 1.0).score == doctest::Approx(0.3));
}

TEST_CASE("two by two grid with weight 4") {
  const oracle::Grid g{{0.2, 0.9}, {0.9, 0.1}};
  DtwTables t;
  CHECK(dtw_distance(g, 4.0, t) == doctest::Approx(0.12));
  CHECK(t.cumulative(1, 1) == doctest::Approx(0.6));
  CHECK(t.cost(1, 1) == 5.0);
  CHECK(t.step(1, 1) == Step::diagonal_weighted);
  CHECK(oracle::best_path(g, 1, 1, 4.0).score == doctest::Approx(0.6));
}

TEST_CASE("a tied diagonal is charged unit cost") {
  // diag: 2*0.5 + 0 = 1.0, vertical: 0.5 + 0.5 = 1.0, horizontal: 0.5 + 0.5 = 1.0
  const oracle::Grid g{{0.0, 0.5}, {0.5, 0.5}};
  DtwTables t;
  dtw_distance(g, 2.0, t);
  CHECK(t.step(1, 1) == Step::diagonal);
  CHECK(t.cost(1, 1) == 2.0);
}

TEST_CASE("vertical wins ties against horizontal") {
  const oracle::Grid g{{0.0, 0.3}, {0.3, 0.4}};
  DtwTables t;
  dtw_distance(g, 10.0, t);
  CHECK(t.step(1, 1) == Step::vertical);
}

TEST_CASE("cumulative distance equals the brute-force minimum path score") {
  std::mt19937_64 rng(8);
  DtwTables t;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t w = 2 + trial % 4;
    const double a = std::array<double, 4>{1.0, 1.5, 2.0, 4.0}[trial % 4];
    const auto g = oracle::random_grid(rng, w, w);
    dtw_distance(g, a, t);
    const auto best = oracle::best_path(g, w - 1, w - 1, a);
    CHECK(t.cumulative(w - 1, w - 1) == doctest::Approx(best.score).epsilon(1e-12));

    const WarpingPath path = t.backtrace(w - 1, w - 1);
    CHECK(path.total_cost() == t.cost(w - 1, w - 1));
    CHECK_FALSE(validate_path(path, w, w - 1).has_value());
  }
}

TEST_CASE("align recomputed from scratch") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t w = 2 + trial % 4;
    const auto x = oracle::random_sequence(rng, w, 24);
    const auto y = oracle::random_sequence(rng, w, 24);
    oracle::Grid g(w, std::vector<double>(w));
    for (std::size_t i = 0; i < w; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        g[i][j] = oracle::cosine(std::vector<double>(x.local(i).begin(), x.local(i).end()),
                                 std::vector<double>(y.local(j).begin(), y.local(j).end()));
      }
    }
    const double a = oracle::adaptive_weight(g, 1.0);
    const auto r = align(x, y, AlignConfig{});
    CHECK(r.weight == doctest::Approx(a));
    CHECK(r.cumulative == doctest::Approx(oracle::best_path(g, w - 1, w - 1, a).score).epsilon(1e-9));
    CHECK(r.distance == doctest::Approx(r.cumulative / r.total_cost));
    CHECK(r.distance == image_distance(x, y, AlignConfig{}));
  }
}

TEST_CASE("adaptive degenerates to vanilla") {
  std::mt19937_64 rng(10);
  AlignConfig adaptive;
  AlignConfig vanilla;
  vanilla.mode = AlignMode::vanilla;
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_sequence(rng, 7, 16);
    const auto y = oracle::random_sequence(rng, 7, 16);
    adaptive.sigma = 0.0;
    const auto ra = align(x, y, adaptive);
    const auto rv = align(x, y, vanilla);
    CHECK(ra.distance == rv.distance);
    CHECK(ra.path == rv.path);
    CHECK(ra.weight == 1.0);

    adaptive.sigma = 1.0;
    const auto centred = align(x, x, adaptive);
    CHECK(centred.weight == 1.0);
    CHECK(centred.distance == align(x, x, vanilla).distance);
  }
}

TEST_CASE("identity alignment in every mode") {
  std::mt19937_64 rng(11);
  const auto x = oracle::random_sequence(rng, 7, 40);
  for (AlignMode mode : {AlignMode::adaptive, AlignMode::vanilla, AlignMode::holistic_cosine,
                         AlignMode::sliding_window}) {
    AlignConfig cfg;
    cfg.mode = mode;
    const auto r = align(x, x, cfg);
    CHECK(r.distance == doctest::Approx(0.0).epsilon(1e-12));
    if (mode != AlignMode::sliding_window) {
      REQUIRE(r.path.size() == 7);
      for (std::size_t p = 0; p < 7; ++p) CHECK(r.path.points[p] == GridPoint{p, p});
    }
  }
}

TEST_CASE("holistic mode is the cosine of the flattened features") {
  std::mt19937_64 rng(12);
  const auto x = oracle::random_sequence(rng, 7, 20);
  const auto y = oracle::random_sequence(rng, 7, 20);
  AlignConfig cfg;
  cfg.mode = AlignMode::holistic_cosine;
  CHECK(align(x, y, cfg).distance == doctest::Approx(oracle::cosine(flatten(x), flatten(y))).epsilon(1e-12));
}

TEST_CASE("sliding window takes the best mean diagonal") {
  std::mt19937_64 rng(13);
  const auto x = oracle::random_sequence(rng, 7, 12);
  const auto y = oracle::random_sequence(rng, 7, 12);
  const auto d = build_distance_matrix(x, y, false, 7);
  AlignConfig cfg;
  cfg.mode = AlignMode::sliding_window;
  cfg.window_size = 4;
  double best = oracle::kInf;
  for (int o = -3; o <= 3; ++o) {
    double sum = 0;
    int count = 0;
    for (int i = 0; i < 7; ++i) {
      if (i + o < 0 || i + o >= 7) continue;
      sum += d(i, i + o);
      ++count;
    }
    best = std::min(best, sum / count);
  }
  CHECK(align(x, y, cfg).distance == doctest::Approx(best));
  CHECK(image_distance(x, y, cfg) == align(x, y, cfg).distance);
}

TEST_CASE("distances of non-negative features stay in [0, 1]") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = oracle::random_sequence(rng, 7, 10);
    const auto y = oracle::random_sequence(rng, 7, 10);
    AlignConfig cfg;
    cfg.sigma = double(trial % 5);
    const double d = align(x, y, cfg).distance;
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
  }
}

TEST_CASE("paths are valid and stay inside the band") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t w = 2 + rng() % 8;
    const auto x = oracle::random_sequence(rng, w, 6);
    const auto y = oracle::random_sequence(rng, w, 6);
    AlignConfig cfg;
    cfg.restricted = trial % 2 == 0;
    cfg.xi = 1 + rng() % w;
    cfg.mode = trial % 3 == 0 ? AlignMode::vanilla : AlignMode::adaptive;
    const auto r = align(x, y, cfg);
    CHECK_FALSE(validate_path(r.path, w, w - 1).has_value());
    CHECK(r.path.total_cost() == doctest::Approx(r.total_cost));
    if (cfg.restricted) {
      for (const auto& p : r.path.points) {
        CHECK((p.row > p.col ? p.row - p.col : p.col - p.row) < cfg.xi);
      }
    }
  }
}

TEST_CASE("xi = 1 forces the diagonal") {
  std::mt19937_64 rng(16);
  const auto x = oracle::random_sequence(rng, 7, 10);
  const auto y = oracle::random_sequence(rng, 7, 10);
  AlignConfig cfg;
  cfg.restricted = true;
  cfg.xi = 1;
  const auto r = align(x, y, cfg);
  for (std::size_t p = 0; p < 7; ++p) CHECK(r.path.points[p] == GridPoint{p, p});
}

TEST_CASE("adaptive alignment sees through a small viewpoint shift") {
  std::mt19937_64 rng(17);
  int wins = 0;
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const auto x = oracle::random_sequence(rng, 7, 64);
    const auto y = shifted_copy(x, 1 + trial % 2, rng);
    const double aligned = align(x, y, AlignConfig{}).distance;
    if (aligned < point_distance(flatten(x), flatten(y))) ++wins;
  }
  MESSAGE("shifted pairs won by alignment: " << wins << "/" << trials);
  CHECK(wins >= 190);
}
