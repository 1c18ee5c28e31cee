#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "inspecsim/kernels/kernels.hpp"

using namespace inspecsim::kernels;

namespace {

BoxSoA random_boxes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> c(-2, 2), h(0.01, 0.8);
  BoxSoA boxes;
  for (std::size_t i = 0; i < n; ++i) {
    double lo[3], hi[3];
    for (int k = 0; k < 3; ++k) {
      const double cc = c(rng), hh = h(rng);
      lo[k] = cc - hh;
      hi[k] = cc + hh;
    }
    boxes.push_back(lo, hi);
  }
  return boxes;
}

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(Kernels, PaddingIsLaneMultiple) {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 9u}) {
    const BoxSoA b = random_boxes(rng, n);
    EXPECT_EQ(b.size(), n);
    EXPECT_EQ(b.padded_size() % BoxSoA::kLanes, 0u);
    EXPECT_GE(b.padded_size(), n);
  }
}

TEST(Kernels, ScalarSegmentAgainstHandCases) {
  BoxSoA b;
  const double lo[3] = {-0.5, -0.5, -0.5}, hi[3] = {0.5, 0.5, 0.5};
  b.push_back(lo, hi);
  std::uint8_t hit[4] = {};
  const double a1[3] = {-2, 0, 0}, b1[3] = {2, 0, 0};
  EXPECT_EQ(scalar_table().segment_hits(b, a1, b1, 0.0, hit), 1u);
  const double a2[3] = {-2, 0, 0.5}, b2[3] = {2, 0, 0.5};  // touches the face only
  EXPECT_EQ(scalar_table().segment_hits(b, a2, b2, 0.0, hit), 0u);
  const double a3[3] = {0.5, 0, 0}, b3[3] = {2, 0, 0};  // starts on the face, leaves
  EXPECT_EQ(scalar_table().segment_hits(b, a3, b3, 0.0, hit), 0u);
  const double p[3] = {0, 0, 0};
  EXPECT_EQ(scalar_table().segment_hits(b, p, p, 0.0, hit), 1u);
}

TEST(Kernels, DispatchHonoursSelection) {
  EXPECT_TRUE(isa_available(Isa::Scalar));
  const Isa before = active_isa();
  ASSERT_TRUE(select_isa(Isa::Scalar));
  EXPECT_EQ(active_isa(), Isa::Scalar);
  select_isa(before);
}

#if defined(INSPECSIM_HAVE_AVX2)

class Avx2Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!isa_available(Isa::Avx2)) GTEST_SKIP() << "CPU lacks AVX2";
  }
};

TEST_F(Avx2Equivalence, PointHits) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.5, 2.5), m(-0.1, 0.4);
  for (int trial = 0; trial < 200; ++trial) {
    const BoxSoA boxes = random_boxes(rng, 1 + trial % 13);
    std::vector<std::uint8_t> hs(boxes.padded_size()), hv(boxes.padded_size());
    for (int i = 0; i < 50; ++i) {
      const double p[3] = {u(rng), u(rng), u(rng)};
      const double margin = m(rng);
      const std::size_t ns = scalar_table().point_hits(boxes, p, margin, hs.data());
      const std::size_t nv = avx2_table().point_hits(boxes, p, margin, hv.data());
      ASSERT_EQ(ns, nv);
      for (std::size_t k = 0; k < boxes.size(); ++k) ASSERT_EQ(hs[k], hv[k]);
    }
  }
}

TEST_F(Avx2Equivalence, SegmentHits) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.5, 2.5), m(-0.1, 0.4);
  for (int trial = 0; trial < 200; ++trial) {
    const BoxSoA boxes = random_boxes(rng, 1 + trial % 13);
    std::vector<std::uint8_t> hs(boxes.padded_size()), hv(boxes.padded_size());
    for (int i = 0; i < 50; ++i) {
      double a[3] = {u(rng), u(rng), u(rng)}, b[3] = {u(rng), u(rng), u(rng)};
      if (i % 10 == 0) b[i % 3] = a[i % 3];  // axis-parallel segments exercise d == 0
      if (i % 17 == 0) std::copy(a, a + 3, b);
      const double margin = m(rng);
      const std::size_t ns = scalar_table().segment_hits(boxes, a, b, margin, hs.data());
      const std::size_t nv = avx2_table().segment_hits(boxes, a, b, margin, hv.data());
      ASSERT_EQ(ns, nv);
      for (std::size_t k = 0; k < boxes.size(); ++k) ASSERT_EQ(hs[k], hv[k]);
    }
  }
}

TEST_F(Avx2Equivalence, DistanceMatrixBitIdentical) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5, 5);
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 33u}) {
    PointSoA pts;
    for (std::size_t i = 0; i < n; ++i) {
      pts.x.push_back(u(rng));
      pts.y.push_back(u(rng));
      pts.z.push_back(u(rng));
    }
    std::vector<double> s(n * n), v(n * n);
    scalar_table().distance_matrix(pts, s.data());
    avx2_table().distance_matrix(pts, v.data());
    for (std::size_t i = 0; i < n * n; ++i) ASSERT_TRUE(bits_equal(s[i], v[i])) << "entry " << i;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double ref = std::sqrt((pts.x[i] - pts.x[j]) * (pts.x[i] - pts.x[j]) +
                                     (pts.y[i] - pts.y[j]) * (pts.y[i] - pts.y[j]) +
                                     (pts.z[i] - pts.z[j]) * (pts.z[i] - pts.z[j]));
        EXPECT_NEAR(s[i * n + j], ref, 1e-12);
      }
    }
  }
}

#endif
