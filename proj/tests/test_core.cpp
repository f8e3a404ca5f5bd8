#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "vpralign/core.hpp"

using namespace vpralign;

TEST_CASE("point distance on hand-picked vectors") {
  const std::vector<double> x{1, 0, 0};
  const std::vector<double> y{0, 1, 0};
  const std::vector<double> minus_x{-1, 0, 0};
  const std::vector<double> zero{0, 0, 0};
  CHECK(point_distance(x, x) == doctest::Approx(0.0));
  CHECK(point_distance(x, y) == doctest::Approx(1.0));
  CHECK(point_distance(x, minus_x) == doctest::Approx(2.0));
  CHECK(point_distance(zero, zero) == 0.0);
  CHECK(point_distance(zero, x) == 1.0);
  CHECK(point_distance(x, zero) == 1.0);
}

TEST_CASE("point distance agrees with a long double reference") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t dim = 1 + rng() % 700;
    std::vector<double> x(dim), y(dim);
    for (double& v : x) v = n(rng);
    for (double& v : y) v = n(rng);
    const double d = point_distance(x, y);
    CHECK(d == doctest::Approx(oracle::cosine(x, y)).epsilon(1e-12));
    CHECK(d == point_distance(y, x));
    CHECK(d >= 0.0);
    CHECK(d <= 2.0);
    std::vector<double> scaled = x;
    for (double& v : scaled) v *= 3.5;
    CHECK(point_distance(scaled, y) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("point distance of a vector with itself is clamped to zero") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1e6);
  std::vector<double> x(1000);
  for (double& v : x) v = u(rng);
  CHECK(point_distance(x, x) >= 0.0);
  CHECK(point_distance(x, x) < 1e-12);
}

TEST_CASE("point distance rejects mismatched or empty vectors") {
  const std::vector<double> a{1, 2}, b{1, 2, 3}, empty;
  CHECK_THROWS_AS(point_distance(a, b), ShapeError);
  CHECK_THROWS_AS(point_distance(empty, empty), ShapeError);
}

TEST_CASE("dot is independent of the entry point") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(10416), y(10416);
  for (double& v : x) v = n(rng);
  for (double& v : y) v = n(rng);
  long double exact = 0;
  for (std::size_t i = 0; i < x.size(); ++i) exact += static_cast<long double>(x[i]) * y[i];
  CHECK(dot(x, y) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-10));
  CHECK(dot(x, y) == dot(x, y));
}

TEST_CASE("feature sequence shape and norms") {
  const auto seq = FeatureSequence::from_locals({{3, 4}, {0, 0}, {1, 0}}, "img");
  CHECK(seq.width() == 3);
  CHECK(seq.dim() == 2);
  CHECK(seq.norm(0) == 5.0);
  CHECK(seq.norm(1) == 0.0);
  CHECK(seq.holistic_norm() == doctest::Approx(std::sqrt(26.0)));
  CHECK(seq.local(2)[0] == 1.0);
  CHECK(flatten(seq) == std::vector<double>{3, 4, 0, 0, 1, 0});
  CHECK(seq.image_id() == "img");
  CHECK(seq.shape_string() == "(W=3, D=2)");

  CHECK_THROWS_AS(FeatureSequence(2, 3, std::vector<double>(5)), ShapeError);
  CHECK_THROWS_AS(FeatureSequence(0, 3, {}), ShapeError);
  CHECK_THROWS_AS(FeatureSequence::from_locals({{1, 2}, {1}}), ShapeError);
}

TEST_CASE("trajectory rejects mixed shapes and slices with clipping") {
  std::vector<FeatureSequence> frames;
  for (int t = 0; t < 5; ++t) frames.emplace_back(2, 2, std::vector<double>{double(t), 1, 1, 1});
  Trajectory traj(frames);
  CHECK(traj.size() == 5);
  CHECK(traj.slice(3, 10).size() == 2);
  CHECK(traj.slice(3, 10)[0].values()[0] == 3.0);
  CHECK(traj.slice(9, 2).empty());

  frames.emplace_back(3, 2, std::vector<double>(6, 1.0));
  CHECK_THROWS_AS(Trajectory{frames}, ShapeError);
}

TEST_CASE("matrix views slice columns and rows") {
  DistanceMatrix m(3, 4);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = double(10 * i + j);
  }
  const MatrixView cols = m.view().columns(2, 5);
  CHECK(cols.cols == 2);
  CHECK(cols(1, 0) == 12.0);
  const MatrixView rows = m.view().row_block(1, 2);
  CHECK(rows.rows == 2);
  CHECK(rows(1, 3) == 23.0);
}

TEST_CASE("path validation") {
  WarpingPath diag{{{0, 0}, {1, 1}, {2, 2}}, {1, 1, 1}};
  CHECK_FALSE(validate_path(diag, 3, 2).has_value());

  WarpingPath jump{{{0, 0}, {2, 2}}, {1, 1}};
  CHECK(validate_path(jump, 3, 2).has_value());

  WarpingPath back{{{0, 0}, {1, 1}, {1, 0}, {2, 1}, {2, 2}}, {1, 1, 1, 1, 1}};
  CHECK(validate_path(back, 3, 2).has_value());

  WarpingPath wrong_end{{{0, 0}, {1, 1}}, {1, 1}};
  CHECK(validate_path(wrong_end, 3, 2).has_value());

  WarpingPath l_shape{{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}}, {1, 1, 1, 1, 1}};
  CHECK_FALSE(validate_path(l_shape, 3, 2).has_value());

  WarpingPath rectangular{{{0, 0}, {0, 1}, {1, 2}, {1, 3}}, {1, 1, 1, 1}};
  CHECK_FALSE(validate_path(rectangular, 2, 3).has_value());
}

TEST_CASE("alignment mode names") {
  for (AlignMode m : {AlignMode::adaptive, AlignMode::vanilla, AlignMode::holistic_cosine,
                      AlignMode::sliding_window}) {
    CHECK(parse_align_mode(to_string(m)) == m);
  }
  CHECK(parse_align_mode("holistic") == AlignMode::holistic_cosine);
  CHECK_THROWS_AS(parse_align_mode("euclidean"), ConfigError);
}

TEST_CASE("align config validation") {
  AlignConfig cfg;
  CHECK_NOTHROW(cfg.validate(7));
  cfg.sigma = -1;
  CHECK_THROWS_AS(cfg.validate(7), ConfigError);
  cfg.sigma = 1;
  cfg.restricted = true;
  cfg.xi = 0;
  CHECK_THROWS_AS(cfg.validate(7), ConfigError);
  cfg.xi = 8;
  CHECK_THROWS_AS(cfg.validate(7), ConfigError);
  cfg.xi = 7;
  CHECK_NOTHROW(cfg.validate(7));
  cfg.mode = AlignMode::sliding_window;
  cfg.window_size = 9;
  CHECK_THROWS_AS(cfg.validate(7), ConfigError);
}
