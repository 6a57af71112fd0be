#include <cmath>
#include <string>

#include "doctest.h"
#include "uvg/array.hpp"
#include "uvg/autodiff.hpp"
#include "uvg/csv.hpp"
#include "uvg/error.hpp"
#include "uvg/parallel.hpp"
#include "uvg/rng.hpp"
#include "uvg/schedule.hpp"

using namespace uvg;

TEST_SUITE("core") {
  TEST_CASE("array shape checks") {
    Array a({2, 3}, {1, 2, 3, 4, 5, 6});
    CHECK(a(1, 2) == 6);
    CHECK(a.row(1)[0] == 4);
    CHECK_THROWS_AS(Array({2, 2}, {1, 2, 3}), InvalidArgument);
    CHECK_THROWS_AS(a.reshaped({4}), InvalidArgument);
    CHECK(a.reshaped({3, 2})(2, 1) == 6);
    CHECK_THROWS_AS(a + Array({3, 2}), InvalidArgument);
    Array bad({2}, {1.0, NAN});
    CHECK_THROWS_AS(bad.check_finite("x"), NumericError);
  }

  TEST_CASE("rng streams are reproducible and serializable") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
    const std::string st = a.save_state();
    const double next = a.uniform();
    Rng c(1);
    c.load_state(st);
    CHECK(c.uniform() == next);
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
    Rng u(3);
    for (int i = 0; i < 1000; ++i) {
      const auto k = u.uniform_int(-2, 5);
      CHECK(k >= -2);
      CHECK(k <= 5);
    }
  }

  TEST_CASE("normal draws have unit moments") {
    Rng r(9);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double v = r.normal();
      s += v;
      s2 += v * v;
    }
    CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  }

  TEST_CASE("parallel_for covers the range once") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) hits[i]++;
    }, 16);
    for (int h : hits) CHECK(h == 1);
  }

  TEST_CASE("csv round trip keeps shortest decimals") {
    CHECK(format_double(0.1) == "0.1");
    for (double v : {1e-4, 1.0 / 3.0, -2.5e300, 0.07858724288177821}) CHECK(std::stod(format_double(v)) == v);
    CsvTable t({"a", "b"});
    t.add_row({"x,y", format_double(2.5)});
    CHECK(t.str() == "a,b\n\"x,y\",2.5\n");
    CHECK_THROWS_AS(t.add_row({"only one"}), InvalidArgument);
  }
}

TEST_SUITE("schedule") {
  TEST_CASE("linear schedule endpoints") {
    const NoiseSchedule s = make_linear_schedule(1000, 1e-4, 2e-2);
    CHECK(s.beta(1) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(s.beta(1000) == doctest::Approx(2e-2).epsilon(1e-12));
    CHECK(s.alpha_bar(1) == doctest::Approx(1.0 - 1e-4).epsilon(1e-14));
    CHECK(s.alpha_bar(0) == 1.0);
    CHECK_THROWS_AS(make_linear_schedule(10, 0.5, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_linear_schedule(0, 1e-4, 2e-2), InvalidArgument);
  }

  TEST_CASE("zero terminal snr") {
    const NoiseSchedule s = rescale_zero_terminal_snr(make_linear_schedule(1000, 1e-4, 2e-2));
    CHECK(s.signal(1000) == 0.0);
    CHECK(snr(s, 1000) == 0.0);
    CHECK(s.beta(1000) == 1.0);
    CHECK(s.terminal_rescaled());
    CHECK_THROWS_AS(rescale_zero_terminal_snr(s), StateError);
  }

  TEST_CASE("offset noise") {
    Rng a(1), b(1);
    CHECK(sample_offset_noise({3, 4}, {0.0}, a) == sample_normal({3, 4}, b));
    Rng c(2);
    const Array big = sample_offset_noise({1, 4}, {1e6}, c);
    // One shared offset per row dominates, so the row is nearly constant.
    CHECK(std::abs(big[0] - big[3]) / std::abs(big[0]) < 1e-4);
    double s = 0.0;
    Rng d(3);
    const Array z = sample_offset_noise({100000, 1}, {0.0}, d);
    for (double v : z.values()) s += v;
    CHECK(std::abs(s / 1e5) < 4.0 / std::sqrt(1e5));
  }
}

TEST_SUITE("autodiff") {
  TEST_CASE("matmul and softmax gradients against finite differences") {
    Rng r(4);
    const Array a0 = sample_normal({3, 4}, r), b0 = sample_normal({4, 5}, r), g = sample_normal({3, 5}, r);
    auto loss = [&](const Array& a) {
      Tape t;
      const auto o = t.softmax(t.tanh(t.matmul(t.leaf(a), t.leaf(b0))));
      double l = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) l += t.value(o)[i] * g[i];
      return l;
    };
    Tape t;
    const auto av = t.leaf(a0, true);
    const auto o = t.softmax(t.tanh(t.matmul(av, t.leaf(b0))));
    t.backward(o, g);
    const Array ga = t.grad(av);
    for (std::size_t i = 0; i < a0.size(); ++i) {
      Array up = a0, dn = a0;
      up[i] += 1e-6;
      dn[i] -= 1e-6;
      CHECK(ga[i] == doctest::Approx((loss(up) - loss(dn)) / 2e-6).epsilon(1e-6));
    }
  }

  TEST_CASE("grad off the path is zero") {
    Tape t;
    const auto a = t.leaf(Array({2}, {1, 2}), true);
    const auto b = t.leaf(Array({2}, {3, 4}), true);
    t.backward(t.scale(a, 2.0), Array({2}, 1.0));
    CHECK(t.grad(b) == Array({2}));
    CHECK(t.grad(a) == Array({2}, {2.0, 2.0}));
  }
}
