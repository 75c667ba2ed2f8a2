#include <doctest.h>

#include <vector>

#include "cycprop/errors.hpp"
#include "cycprop/metrics.hpp"
#include "cycprop/random.hpp"

using namespace cycprop;

TEST_CASE("worked example") {
  const std::vector<std::int32_t> pred = {0, 0, 1, 1};
  const std::vector<std::int32_t> truth = {0, 1, 1, 1};
  const auto r = micro_macro_f1(pred, truth, 2);
  CHECK(r.micro_f1 == doctest::Approx(0.75));
  CHECK(r.macro_f1 == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0));
  CHECK(r.macro_f1 == doctest::Approx(0.7333).epsilon(1e-4));
  CHECK(r.per_class[0].precision == 0.5);
  CHECK(r.per_class[0].recall == 1.0);
  CHECK(r.per_class[1].support == 3);
  CHECK(r.per_class[1].predicted == 2);
  CHECK(r.n_eval == 4);
}

TEST_CASE("perfect prediction scores one") {
  const std::vector<std::int32_t> y = {2, 0, 1, 2, 2};
  const auto r = micro_macro_f1(y, y, 3);
  CHECK(r.micro_f1 == 1.0);
  CHECK(r.macro_f1 == 1.0);
}

TEST_CASE("micro f1 equals accuracy") {
  RandomSource rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 1 + rng.below(40);
    std::vector<std::int32_t> p(n), t(n);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = static_cast<std::int32_t>(rng.below(4));
      t[i] = static_cast<std::int32_t>(rng.below(4));
      hit += p[i] == t[i];
    }
    const auto r = micro_macro_f1(p, t, 4);
    CHECK(r.micro_f1 == doctest::Approx(static_cast<double>(hit) / n));
    CHECK(r.macro_f1 >= 0.0);
    CHECK(r.macro_f1 <= 1.0);
  }
}

TEST_CASE("absent classes are left out of the macro average") {
  const std::vector<std::int32_t> y = {0, 0, 1};
  CHECK(micro_macro_f1(y, y, 5).macro_f1 == 1.0);
  CHECK(micro_macro_f1(y, y, 5).per_class.size() == 5);
}

TEST_CASE("bad input") {
  const std::vector<std::int32_t> a = {0, 1}, b = {0}, neg = {-1, 0};
  CHECK_THROWS_AS(micro_macro_f1(a, b), InputError);
  CHECK_THROWS_AS(micro_macro_f1(neg, a), InputError);
}
