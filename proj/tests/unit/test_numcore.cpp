#include <doctest.h>

#include <cmath>
#include <vector>

#include "uforge/numcore/error.hpp"
#include "uforge/numcore/format.hpp"
#include "uforge/numcore/param_vector.hpp"
#include "uforge/numcore/rng.hpp"
#include "uforge/numcore/stats.hpp"

using namespace uforge;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are deterministic and separated") {
  auto draw = [](RngStream s, int n) {
    std::vector<std::uint64_t> v;
    for (int i = 0; i < n; ++i) v.push_back(s.next_u64());
    return v;
  };
  CHECK(draw(derive_stream(42, 0), 100) == draw(derive_stream(42, 0), 100));
  CHECK(draw(derive_stream(42, 0), 100) != draw(derive_stream(43, 0), 100));

  const auto a = draw(derive_stream(42, 0), 10000);
  const auto b = draw(derive_stream(42, 1), 10000);
  int differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += a[i] != b[i];
  MESSAGE("fraction of differing positions: " << differ / 1e4);
  CHECK(differ >= 9900);
}

TEST_CASE("child streams ignore the parent position") {
  RngStream s = derive_stream(5, 9);
  const RngStream c0 = s.child(3);
  s.next_u64();
  s.next_u64();
  RngStream c1 = s.child(3);
  RngStream c0m = c0;
  CHECK(c0m.next_u64() == c1.next_u64());
}

TEST_CASE("uniform_index stays in range") {
  RngStream s = derive_stream(1, 1);
  for (int i = 0; i < 1000; ++i) CHECK(s.uniform_index(7) < 7);
}

TEST_CASE("kaiming sample moments") {
  const std::size_t d = 1000;
  RngStream s = derive_stream(11, 2);
  std::vector<double> pooled;
  pooled.reserve(1000000);
  for (int k = 0; k < 1000; ++k) {
    const ParamVector v = kaiming_sample(d, s);
    pooled.insert(pooled.end(), v.begin(), v.end());
  }
  const double m = stats::mean(pooled);
  const double var = stats::variance(pooled);
  const double sd = std::sqrt(2.0 / d);
  MESSAGE("mean " << m << " variance " << var);
  CHECK(std::abs(m) <= 3 * sd / std::sqrt(static_cast<double>(pooled.size())));
  CHECK(std::abs(var - 0.002) <= 0.01 * 0.002);

  std::vector<double> sub(pooled.begin(), pooled.begin() + 20000);
  const double ks = stats::ks_statistic(sub, [&](double x) { return stats::normal_cdf(x, 0.0, sd); });
  CHECK(stats::ks_p_value(ks, sub.size()) > 0.001);
}

TEST_CASE("kaiming sample edge cases") {
  RngStream s = derive_stream(3, 3);
  const ParamVector one = kaiming_sample(1, s);
  CHECK(one.dim() == 1);
  CHECK(std::isfinite(one[0]));
  CHECK_THROWS_AS(kaiming_sample(0, s), InvalidArgument);
  RngStream a = derive_stream(8, 1);
  RngStream b = derive_stream(8, 1);
  CHECK(kaiming_sample(50, a) == kaiming_sample(50, b));
}

TEST_CASE("axpy_merge") {
  const ParamVector x({2.0, 4.0});
  const ParamVector y({0.0, 0.0});
  CHECK(axpy_merge(1.0, x, 0.0, y) == x);
  CHECK(axpy_merge(0.5, x, 0.5, y) == ParamVector({1.0, 2.0}));
  const ParamVector z({7.0, -3.0});
  const double alpha = 1.0;
  CHECK(axpy_merge(alpha, x, 1.0 - alpha, z) == x);
  CHECK_THROWS_AS(axpy_merge(1.0, x, 1.0, ParamVector(3)), DimensionError);
}

TEST_CASE("stats helpers") {
  const std::vector<double> up{1, 2, 3, 5, 8};
  CHECK(stats::spearman_vs_index(up) == doctest::Approx(1.0));
  const std::vector<double> down{9, 4, 4, 1};
  CHECK(stats::spearman_vs_index(down) < 0);
  std::vector<double> ranks(4);
  stats::average_ranks(down, ranks);
  CHECK(ranks == std::vector<double>{4, 2.5, 2.5, 1});
  CHECK(stats::sign_test_p(10, 10) == doctest::Approx(1.0 / 1024));
  CHECK(stats::sign_test_p(0, 10) == doctest::Approx(1.0));
  const std::vector<double> xs{0, 1, 2, 3};
  const std::vector<double> ys{1, 3, 5, 7};
  CHECK(stats::ols_slope(xs, ys) == doctest::Approx(2.0));
  CHECK(stats::normal_cdf(0.0, 0.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 22.0 / 7.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(2.5) == "2.5");
}
