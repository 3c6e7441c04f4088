#include "doctest.h"

#include <cmath>
#include <vector>

#include "gapflyt/error.hpp"
#include "gapflyt/morphology.hpp"
#include "gapflyt/polygon.hpp"
#include "gapflyt/rng.hpp"
#include "gapflyt/ts2p.hpp"

using namespace gapflyt;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

Mask square_mask(int rows, int cols, int x0, int y0, int side) {
  Mask m = Mask::Constant(rows, cols, false);
  m.block(y0, x0, side, side).setConstant(true);
  return m;
}

FlowField constant_field(int rows, int cols, double u, double v) {
  FlowField f(rows, cols);
  f.u.setConstant(u);
  f.v.setConstant(v);
  return f;
}

StackedFlow two_region(const Mask& inside, double fg, double bg) {
  StackedFlow s;
  s.count = 1;
  s.mean_magnitude = inside.select(Grid<double>::Constant(inside.rows(), inside.cols(), bg), fg);
  s.valid = Mask::Constant(inside.rows(), inside.cols(), true);
  return s;
}

Mask brute_dilate(const Mask& set, double r) {
  Mask out = Mask::Constant(set.rows(), set.cols(), false);
  const int k = static_cast<int>(std::floor(r));
  for (int y = 0; y < set.rows(); ++y)
    for (int x = 0; x < set.cols(); ++x)
      for (int dy = -k; dy <= k && !out(y, x); ++dy)
        for (int dx = -k; dx <= k; ++dx) {
          if (dx * dx + dy * dy > r * r) continue;
          const int qx = x + dx, qy = y + dy;
          if (qx >= 0 && qy >= 0 && qx < set.cols() && qy < set.rows() && set(qy, qx)) {
            out(y, x) = true;
            break;
          }
        }
  return out;
}

Mask brute_erode(const Mask& set, double r) {
  Mask out = Mask::Constant(set.rows(), set.cols(), false);
  const int k = static_cast<int>(std::floor(r));
  for (int y = 0; y < set.rows(); ++y)
    for (int x = 0; x < set.cols(); ++x) {
      if (!set(y, x)) continue;
      bool all = true;
      for (int dy = -k; dy <= k && all; ++dy)
        for (int dx = -k; dx <= k; ++dx) {
          if (dx * dx + dy * dy > r * r) continue;
          const int qx = x + dx, qy = y + dy;
          if (qx < 0 || qy < 0 || qx >= set.cols() || qy >= set.rows() || !set(qy, qx)) {
            all = false;
            break;
          }
        }
      out(y, x) = all;
    }
  return out;
}

// Star-shaped random polygon rasterised at pixel centres of a size x size grid.
Mask random_polygon_mask(std::uint64_t key, int size) {
  const int n = 3 + static_cast<int>(to_unit(hash_key(key, 0)) * 8);
  const Eigen::Vector2d c(size / 2.0, size / 2.0);
  Polygon poly;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * (i + 0.8 * to_unit(hash_key(key, 1, i))) / n;
    const double r = size * (0.12 + 0.33 * to_unit(hash_key(key, 2, i)));
    poly.emplace_back(c.x() + r * std::cos(t), c.y() + r * std::sin(t));
  }
  Mask m = Mask::Constant(size, size, false);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) m(y, x) = contains(poly, {x, y});
  return m;
}

}  // namespace

TEST_CASE("stack_flows: idempotence and arithmetic") {
  std::vector<FlowField> same(3, constant_field(8, 9, 0.3, 0.4));
  const StackedFlow s = stack_flows(same);
  CHECK((s.mean_magnitude == 0.5).all());
  CHECK(s.count == 3);

  std::vector<FlowField> two{constant_field(4, 4, 0.2, 0.0), constant_field(4, 4, 0.0, -0.4)};
  two[1].valid(1, 2) = false;
  const StackedFlow t = stack_flows(two);
  CHECK(t.mean_magnitude(0, 0) == doctest::Approx(0.3));
  CHECK_FALSE(t.valid(1, 2));
  CHECK(t.valid.count() == 15);

  CHECK(code_of([] { stack_flows(std::span<const FlowField>{}); }) == ErrorCode::EmptyStack);
  std::vector<FlowField> mixed{constant_field(4, 4, 0, 0), constant_field(4, 5, 0, 0)};
  CHECK(code_of([&] { stack_flows(mixed); }) == ErrorCode::DimensionMismatch);
  const std::vector<int> none;
  CHECK(code_of([&] { stack_flows(0, none, [](int, int) { return FlowField(2, 2); }); }) == ErrorCode::EmptyStack);
}

TEST_CASE("stack_flows: noise on the mean magnitude shrinks as N^-1/2") {
  // Along a strong flow the magnitude noise is the component noise, so the
  // stacked mean has std sigma / sqrt(N); with zero flow it is Rayleigh
  // distributed with std sqrt(2 - pi/2) sigma / sqrt(N).
  const int rows = 100, cols = 100;
  const double sigma = 0.1;
  for (double base : {10.0, 0.0}) {
    const double per_sample = base > 0.0 ? sigma : std::sqrt(2.0 - std::numbers::pi / 2.0) * sigma;
    for (int n : {1, 4}) {
      std::vector<FlowField> flows;
      for (int j = 0; j < n; ++j) {
        FlowField f = constant_field(rows, cols, base, 0.0);
        for (int y = 0; y < rows; ++y)
          for (int x = 0; x < cols; ++x) {
            const auto [a, b] = gaussian_pair(hash_key(99, j, y, x));
            f.u(y, x) += sigma * a;
            f.v(y, x) += sigma * b;
          }
        flows.push_back(std::move(f));
      }
      const Grid<double> m = stack_flows(flows).mean_magnitude;
      const double sd = std::sqrt((m - m.mean()).square().mean());
      CHECK(sd == doctest::Approx(per_sample / std::sqrt(n)).epsilon(0.1));
    }
  }
}

TEST_CASE("xi_field: flat field gives zero, a step spikes on the boundary") {
  const StackedFlow flat = two_region(Mask::Constant(40, 40, false), 0.2, 0.2);
  CHECK(xi_field(flat).values.maxCoeff() == 0.0);

  const Mask inside = square_mask(200, 300, 100, 50, 100);
  const XiField xi = xi_field(two_region(inside, 0.2, 0.05));
  const double peak = xi.values.maxCoeff();
  const Mask edge = boundary(inside) || boundary(!inside);
  const Mask near = dilate_disc(edge, 1.5);
  for (int y = 0; y < xi.values.rows(); ++y)
    for (int x = 0; x < xi.values.cols(); ++x)
      if (xi.values(y, x) == peak) CHECK(near(y, x));
  CHECK(((xi.values > 0.0) && !near).count() == 0);
}

TEST_CASE("xi_field: scaling the flow by c scales Xi by 1/c and keeps detection") {
  const Mask inside = square_mask(200, 300, 100, 50, 100);
  const XiField a = xi_field(two_region(inside, 0.2, 0.05));
  const XiField b = xi_field(two_region(inside, 0.8, 0.2));
  CHECK((a.values - 4.0 * b.values).abs().maxCoeff() < 1e-9);
  CHECK(((a.values >= 0.2 * a.values.maxCoeff()) == (b.values >= 0.2 * b.values.maxCoeff())).all());
  const GapDetection da = detect_gap(a, 3.0);
  const GapDetection db = detect_gap(b, 3.0);
  CHECK((da.opening == db.opening).all());
}

TEST_CASE("detect_gap: two-region square is recovered within 2 px") {
  const Mask inside = square_mask(200, 300, 100, 50, 100);
  const GapDetection d = detect_gap(xi_field(two_region(inside, 0.2, 0.05)), 3.0);
  CHECK((d.opening && !dilate_disc(inside, 2.0)).count() == 0);
  CHECK((erode_disc(inside, 2.0) && !d.opening).count() == 0);
  const DetectionMetrics m = detection_metrics(d.opening, inside);
  CHECK(m.lambda_d >= 0.9);
  CHECK(m.success);
  CHECK((d.foreground_band && d.opening).count() == 0);
  CHECK((d.background_core && !d.opening).count() == 0);
  CHECK((d.uncertainty && (d.foreground_band || d.background_core)).count() == 0);
  CHECK(((d.uncertainty || d.foreground_band || d.background_core) == Mask::Constant(200, 300, true)).all());
}

TEST_CASE("detect_gap: flat Xi and open edges fail") {
  XiField zero;
  zero.values = Grid<double>::Zero(50, 60);
  zero.gx = zero.values;
  zero.gy = zero.values;
  zero.valid = Mask::Constant(50, 60, true);
  CHECK(code_of([&] { detect_gap(zero, 3.0); }) == ErrorCode::NoGapFound);

  // A single straight edge splits the image but encloses nothing.
  Mask left = Mask::Constant(80, 80, false);
  left.leftCols(40).setConstant(true);
  CHECK(code_of([&] { detect_gap(xi_field(two_region(left, 0.2, 0.05)), 3.0); }) == ErrorCode::NoGapFound);
}

TEST_CASE("label_sets: 60x60 square with radii 12, 4, 6") {
  const Mask o = square_mask(120, 120, 30, 30, 60);
  const LabelSets s = label_sets(o, 12.0, 4.0, 6.0);
  CHECK((s.background == square_mask(120, 120, 36, 36, 48)).all());
  CHECK((s.foreground && o).count() == 0);
  CHECK((s.background && !o).count() == 0);
  int ring = 0;
  for (int x = 0; x < 120; ++x) ring += s.foreground(60, x) ? 1 : 0;
  CHECK(ring == 16);
  CHECK(code_of([&] { label_sets(o, 12.0, 4.0, 40.0); }) == ErrorCode::GapTooSmall);
  const LabelSets touching = label_sets(o, 12.0, 0.0, 6.0);
  CHECK((touching.foreground && dilate_disc(boundary(o), 1.0)).count() > 0);
  CHECK(touching.foreground(60, 29));
  CHECK_THROWS_AS(label_sets(o, 4.0, 4.0, 6.0), Error);
}

TEST_CASE("label_sets match brute-force Minkowski morphology on random polygons") {
  for (std::uint64_t k = 0; k < 12; ++k) {
    const Mask o = random_polygon_mask(k, 48 + static_cast<int>(k % 3) * 8);
    if (o.count() == 0) continue;
    const double e1 = 6.0 + static_cast<double>(k % 4), e2 = 2.0 + static_cast<double>(k % 2), e3 = 2.0;
    const Mask band = brute_dilate(o, e1) && !brute_dilate(o, e2);
    const Mask core = brute_erode(o, e3);
    if (core.count() == 0) {
      CHECK(code_of([&] { label_sets(o, e1, e2, e3); }) == ErrorCode::GapTooSmall);
      continue;
    }
    const LabelSets s = label_sets(o, e1, e2, e3);
    CHECK((s.foreground == band).all());
    CHECK((s.background == core).all());
    CHECK((s.background && !o).count() == 0);
    CHECK((s.foreground && dilate_disc(o, e2)).count() == 0);
  }
}

TEST_CASE("detection_metrics examples and the complement identity") {
  const Mask g = square_mask(50, 50, 10, 10, 20);
  const DetectionMetrics same = detection_metrics(g, g);
  CHECK(same.lambda_d == 1.0);
  CHECK(same.lambda_n == 0.0);
  REQUIRE(same.lambda_p);
  CHECK(*same.lambda_p == 0.0);
  CHECK(same.success);

  const DetectionMetrics none = detection_metrics(Mask::Constant(50, 50, false), g);
  CHECK(none.lambda_d == 0.0);
  CHECK(none.lambda_n == 1.0);
  CHECK_FALSE(none.lambda_p);
  CHECK_FALSE(none.success);

  // |G| = 1000, |G & O| = 860.
  Mask big = Mask::Constant(40, 50, false);
  big.topRows(20).setConstant(true);
  Mask o = big;
  o.topRows(2).setConstant(false);
  o.block(2, 0, 1, 40).setConstant(false);
  o.block(30, 0, 2, 5).setConstant(true);
  REQUIRE(big.count() == 1000);
  REQUIRE((big && o).count() == 860);
  const DetectionMetrics m = detection_metrics(o, big);
  CHECK(m.lambda_d == 0.86);
  CHECK(m.lambda_n == doctest::Approx(0.14));
  CHECK(m.success);
  REQUIRE(m.lambda_p);
  CHECK(*m.lambda_p == doctest::Approx(0.01));

  CHECK(code_of([&] { detection_metrics(g, Mask::Constant(50, 50, false)); }) == ErrorCode::EmptyGroundTruth);
  CHECK(code_of([&] { detection_metrics(g, Mask::Constant(50, 51, false)); }) == ErrorCode::DimensionMismatch);

  for (std::uint64_t k = 0; k < 1000; ++k) {
    const int rows = 5 + static_cast<int>(hash_key(k, 1) % 40), cols = 5 + static_cast<int>(hash_key(k, 2) % 40);
    Mask gg(rows, cols), oo(rows, cols);
    const double pg = to_unit(hash_key(k, 3)), po = to_unit(hash_key(k, 4));
    for (int i = 0; i < rows * cols; ++i) {
      gg.reshaped()(i) = to_unit(hash_key(k, 5, i)) < pg;
      oo.reshaped()(i) = to_unit(hash_key(k, 6, i)) < po;
    }
    if (gg.count() == 0) gg(0, 0) = true;
    const DetectionMetrics r = detection_metrics(oo, gg);
    CHECK(r.lambda_d + r.lambda_n == 1.0);
  }
}

TEST_CASE("label radii scale with image height") {
  const LabelRadii r = LabelRadii::for_height(384);
  CHECK(r.eps1 == 12.0);
  CHECK(r.eps2 == 4.0);
  CHECK(r.eps3 == 6.0);
  const LabelRadii s = LabelRadii::for_height(96);
  CHECK(s.eps1 == doctest::Approx(3.0));
  CHECK(s.eps3 == doctest::Approx(1.5));
}
