#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "psyn/error.hpp"
#include "psyn/kernels.hpp"
#include "psyn/rng.hpp"

namespace k = psyn::kernels;

namespace {

std::vector<double> random_vector(psyn::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

// Runs `body` once per non-scalar variant available on this machine.
template <class F>
void for_each_simd_table(F body) {
  int seen = 0;
  for (k::Isa isa : k::available_isas()) {
    if (isa == k::Isa::kScalar) continue;
    SCOPED_TRACE(std::string(k::isa_name(isa)));
    body(*k::table_for(isa));
    ++seen;
  }
  if (seen == 0) GTEST_SKIP() << "no SIMD variant available";
}

}  // namespace

TEST(Kernels, ScalarAlwaysAvailable) {
  ASSERT_NE(k::table_for(k::Isa::kScalar), nullptr);
  EXPECT_EQ(k::available_isas().back(), k::Isa::kScalar);
}

TEST(Kernels, ActiveIsBestAvailable) {
  EXPECT_EQ(k::active().isa, k::available_isas().front());
}

TEST(Kernels, PinningUnavailableVariantThrows) {
  for (k::Isa isa : {k::Isa::kAvx2, k::Isa::kNeon})
    if (k::table_for(isa) == nullptr) EXPECT_THROW(k::set_active_isa(isa), psyn::ConfigError);
}

TEST(Kernels, ScalarReference) {
  const auto& s = k::scalar_table();
  std::vector<double> a{1, -2, 3}, b{4, 5, -6};
  EXPECT_EQ(s.dot(a.data(), b.data(), 3), 4 - 10 - 18);
  EXPECT_EQ(s.sum(a.data(), 3), 2);
  EXPECT_EQ(s.abs_sum(a.data(), 3), 6);
  EXPECT_EQ(s.max_abs_diff(a.data(), b.data(), 3), 9);
  s.axpy(2.0, a.data(), b.data(), 3);
  EXPECT_EQ(b, (std::vector<double>{6, 1, 0}));
  std::vector<double> out(3);
  s.clamp(a.data(), -1.0, 2.0, out.data(), 3);
  EXPECT_EQ(out, (std::vector<double>{1, -1, 2}));
}

// Every SIMD variant against the scalar reference, over lengths that hit the
// unrolled body, the 4-wide tail and the scalar tail.
TEST(Kernels, SimdMatchesScalar) {
  const auto& ref = k::scalar_table();
  for_each_simd_table([&](const k::KernelTable& t) {
    psyn::Rng rng(42);
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto a = random_vector(rng, n);
      const auto b = random_vector(rng, n);
      const double scale = static_cast<double>(n) * 4.0 + 1.0;
      EXPECT_NEAR(t.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), 1e-14 * scale);
      EXPECT_NEAR(t.sum(a.data(), n), ref.sum(a.data(), n), 1e-14 * scale);
      EXPECT_NEAR(t.abs_sum(a.data(), n), ref.abs_sum(a.data(), n), 1e-14 * scale);
      EXPECT_EQ(t.max_abs_diff(a.data(), b.data(), n), ref.max_abs_diff(a.data(), b.data(), n));

      std::vector<double> c1(n), c2(n);
      t.clamp(a.data(), -0.5, 0.75, c1.data(), n);
      ref.clamp(a.data(), -0.5, 0.75, c2.data(), n);
      EXPECT_EQ(c1, c2);

      auto y1 = b, y2 = b;
      t.axpy(-1.25, a.data(), y1.data(), n);
      ref.axpy(-1.25, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * 8);
    }
  });
}

TEST(Kernels, ClampInPlaceAndInfiniteBounds) {
  for (k::Isa isa : k::available_isas()) {
    const auto& t = *k::table_for(isa);
    std::vector<double> v{-3, -0.0, 0.5, 1e300};
    t.clamp(v.data(), 0.0, std::numeric_limits<double>::infinity(), v.data(), v.size());
    EXPECT_EQ(v[0], 0.0);
    EXPECT_EQ(v[2], 0.5);
    EXPECT_EQ(v[3], 1e300);
  }
}

TEST(Kernels, SetActiveRoundTrip) {
  const k::Isa before = k::active().isa;
  k::set_active_isa(k::Isa::kScalar);
  EXPECT_EQ(k::active().isa, k::Isa::kScalar);
  k::set_active_isa(before);
  EXPECT_EQ(k::active().isa, before);
}
