#include <doctest.h>

#include <random>

#include "salsa/frame.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace salsa;
namespace oracle = salsa::oracle;

TEST_CASE("constant image has zero details and a constant approximation") {
  const ImageBuffer x(Shape{16, 16}, 42.0);
  const FrameCoeffs c = analysis(x, FrameSpec{1});
  REQUIRE(c.subband_count() == 4);
  for (int o = 0; o < 3; ++o)
    for (double v : c.detail(1, static_cast<Orientation>(o))) CHECK(v == 0.0);
  for (double v : c.approximation()) CHECK(v == doctest::Approx(42.0));
}

TEST_CASE("zero in, zero out") {
  const FrameCoeffs c = analysis(ImageBuffer(Shape{16, 16}), FrameSpec{2});
  for (double v : c.values()) CHECK(v == 0.0);
  const ImageBuffer x = synthesis(FrameCoeffs(Shape{16, 16}, 2), FrameSpec{2});
  for (double v : x.values()) CHECK(v == 0.0);
}

TEST_CASE("coefficient count is (3 levels + 1) times the pixels") {
  for (int levels = 1; levels <= 4; ++levels) {
    const FrameCoeffs c = analysis(ImageBuffer(Shape{32, 48}), FrameSpec{levels});
    CHECK(c.size() == static_cast<std::size_t>(3 * levels + 1) * 32 * 48);
    CHECK(c.subband_count() == FrameSpec{levels}.subband_count());
  }
}

TEST_CASE("analysis matches the dense Kronecker construction") {
  std::mt19937_64 rng(21);
  for (auto [shape, levels] : {std::pair{Shape{8, 8}, 1}, std::pair{Shape{8, 16}, 2}, std::pair{Shape{16, 16}, 4}}) {
    const oracle::Matrix wt = oracle::analysis_matrix(shape, levels);
    const ImageBuffer x = testing::random_image(shape, rng);
    const FrameCoeffs c = analysis(x, FrameSpec{levels});
    const oracle::Vector want = wt * oracle::to_vector(x);
    CHECK(oracle::relative_error(oracle::to_vector(c.values()), want) <= 1e-13);

    const FrameCoeffs b = testing::random_coeffs(shape, levels, rng);
    const oracle::Vector synth = wt.transpose() * oracle::to_vector(b.values());
    CHECK(oracle::relative_error(oracle::to_vector(synthesis(b, FrameSpec{levels})), synth) <= 1e-13);
    // W W^T = I for the dense operator too.
    CHECK((wt.transpose() * wt - oracle::Matrix::Identity(wt.cols(), wt.cols())).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("Parseval round trip and adjointness on random sizes and levels") {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> levels_dist(1, 4), mult(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    const int levels = levels_dist(rng);
    const std::size_t step = std::size_t{1} << levels;
    const Shape shape{step * mult(rng) * (levels < 3 ? 4 : 1), step * mult(rng) * (levels < 3 ? 4 : 1)};
    const FrameSpec spec{levels};
    const ImageBuffer x = testing::random_image(shape, rng);
    const FrameCoeffs c = analysis(x, spec);
    CHECK(oracle::max_abs_diff(synthesis(c, spec).values(), x.values()) <= 1e-10);
    // Energy is preserved exactly by an isometry, so ||W^T x|| >= ||x|| with equality.
    CHECK(coeffs_norm2(c) * coeffs_norm2(c) >= squared_norm(x.values()) * (1.0 - 1e-12));
    CHECK(coeffs_norm2(c) * coeffs_norm2(c) == doctest::Approx(squared_norm(x.values())).epsilon(1e-12));

    const FrameCoeffs b = testing::random_coeffs(shape, levels, rng);
    const double lhs = coeffs_dot(c, b);
    const double rhs = dot(x.values(), synthesis(b, spec).values());
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
  }
}

TEST_CASE("synthesis is linear") {
  std::mt19937_64 rng(23);
  const Shape shape{32, 32};
  const FrameSpec spec{3};
  const FrameCoeffs a = testing::random_coeffs(shape, 3, rng), b = testing::random_coeffs(shape, 3, rng);
  const ImageBuffer xa = synthesis(a, spec), xb = synthesis(b, spec);
  const ImageBuffer xs = synthesis(coeffs_axpy(-2.5, a, b), spec);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(xs.values()[i] == doctest::Approx(-2.5 * xa.values()[i] + xb.values()[i]).epsilon(1e-12));
  }
  const ImageBuffer x2 = synthesis(coeffs_scale(2.0, a), spec);
  for (std::size_t i = 0; i < x2.size(); ++i) CHECK(x2.values()[i] == doctest::Approx(2.0 * xa.values()[i]));
}

TEST_CASE("detail bands pick up edges with the documented orientation") {
  // A horizontal edge (rows differ, columns equal) excites only H at level 1.
  ImageBuffer x(Shape{16, 16});
  for (std::size_t r = 8; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c) x(r, c) = 1.0;
  const FrameCoeffs c = analysis(x, FrameSpec{1});
  CHECK(coeffs_norm2(c) > 0.0);
  double h = 0, v = 0, d = 0;
  for (double t : c.detail(1, Orientation::Horizontal)) h += std::abs(t);
  for (double t : c.detail(1, Orientation::Vertical)) v += std::abs(t);
  for (double t : c.detail(1, Orientation::Diagonal)) d += std::abs(t);
  CHECK(h > 0.0);
  CHECK(v == 0.0);
  CHECK(d == 0.0);
}

TEST_CASE("into-variants agree with the allocating forms") {
  std::mt19937_64 rng(24);
  const FrameSpec spec{2};
  const ImageBuffer x = testing::random_image(Shape{16, 16}, rng);
  FrameCoeffs c;
  analysis_into(x, spec, c);
  CHECK(oracle::max_abs_diff(c.values(), analysis(x, spec).values()) == 0.0);
  ImageBuffer y;
  synthesis_into(c, spec, y);
  CHECK(oracle::max_abs_diff(y.values(), synthesis(c, spec).values()) == 0.0);
}

TEST_CASE("vector operations") {
  FrameCoeffs a(Shape{2, 2}, 1, 1.0), b(Shape{2, 2}, 1, -2.0);
  CHECK(coeffs_norm1(b) == 32.0);
  CHECK(coeffs_norm2(a) == doctest::Approx(4.0));
  CHECK(coeffs_dot(a, b) == -32.0);
  coeffs_axpy(2.0, a, b);
  for (double v : b.values()) CHECK(v == 0.0);
  const FrameCoeffs scaled = coeffs_scale(3.0, a);
  for (double v : scaled.values()) CHECK(v == 3.0);
}

TEST_CASE("frame errors") {
  CHECK_THROWS_AS(analysis(ImageBuffer(Shape{12, 16}), FrameSpec{3}), std::invalid_argument);
  CHECK_THROWS_AS(analysis(ImageBuffer(Shape{16, 16}), FrameSpec{0}), std::invalid_argument);
  CHECK_THROWS_AS(synthesis(FrameCoeffs(Shape{16, 16}, 2), FrameSpec{3}), std::invalid_argument);
  FrameCoeffs a(Shape{4, 4}, 1), b(Shape{4, 4}, 2);
  CHECK_THROWS_AS(coeffs_axpy(1.0, a, b), std::invalid_argument);
  CHECK_THROWS_AS(coeffs_dot(a, b), std::invalid_argument);
  CHECK_THROWS_AS(a.subband(4), std::out_of_range);
}
