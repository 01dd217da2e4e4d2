#include "carbonsched/selector.hpp"

#include <cmath>
#include <random>

#include "carbonsched/errors.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace carbonsched;
using namespace std::chrono_literals;

namespace {

CarbonTrace history_of(std::initializer_list<double> values) {
  std::vector<CarbonSample> s;
  auto t = gen::epoch();
  for (double v : values) {
    s.push_back({{t, t + 30min}, v});
    t += 30min;
  }
  return CarbonTrace(std::move(s));
}

const ModelProfile* brute_force(double target, const ModelPool& pool) {
  const ModelProfile* best = nullptr;
  for (const auto& p : pool.profiles()) {
    if (best == nullptr) {
      best = &p;
      continue;
    }
    const double d = std::fabs(p.energy_mj - target);
    const double db = std::fabs(best->energy_mj - target);
    if (d < db || (d == db && p.energy_mj < best->energy_mj)) best = &p;
  }
  return best;
}

}  // namespace

TEST_SUITE("selector") {
  TEST_CASE("observe_bounds") {
    const auto h = history_of({100, 200, 150});
    const auto b = observe_bounds(h, h.back().interval.start, BoundsWindow::whole_trace());
    CHECK(b.c_low == 100.0);
    CHECK(b.c_high == 200.0);

    const auto single = history_of({171});
    const auto s = observe_bounds(single, single.front().interval.start, BoundsWindow::whole_trace());
    CHECK(s.c_low == 171.0);
    CHECK(s.c_high == 171.0);
  }

  TEST_CASE("observe_bounds: trailing window drops older samples") {
    const Timestamp t = gen::epoch() + 48h;
    const CarbonTrace h({{{t - 30h, t - 30h + 30min}, 300},
                         {{t - 2h, t - 2h + 30min}, 100},
                         {{t - 1h, t - 1h + 30min}, 200}});
    const auto b = observe_bounds(h, t, BoundsWindow::trailing(24h));
    CHECK(b.c_low == 100.0);
    CHECK(b.c_high == 200.0);
    const auto whole = observe_bounds(h, t, BoundsWindow::whole_trace());
    CHECK(whole.c_high == 300.0);
  }

  TEST_CASE("observe_bounds: trailing window excludes samples after `at`") {
    const auto h = history_of({100, 200, 900});
    const auto b = observe_bounds(h, h.samples()[1].interval.start, BoundsWindow::trailing(24h));
    CHECK(b.c_high == 200.0);
  }

  TEST_CASE("observe_bounds: nothing in the window is an error") {
    const auto h = history_of({100});
    CHECK_THROWS_AS(observe_bounds(h, gen::epoch() - 1h, BoundsWindow::whole_trace()), DataError);
    CHECK_THROWS_AS(observe_bounds(h, gen::epoch() + 30h, BoundsWindow::trailing(24h)), DataError);
    CHECK_THROWS_AS(BoundsWindow::trailing(0h), ConfigError);
  }

  TEST_CASE("intensity_fraction") {
    const IntensityBounds b{100, 200};
    CHECK(intensity_fraction(100, b) == 0.0);
    CHECK(intensity_fraction(200, b) == 1.0);
    CHECK(intensity_fraction(150, b) == 0.5);
    CHECK(intensity_fraction(50, b) == 0.0);
    CHECK(intensity_fraction(250, b) == 1.0);
    CHECK(intensity_fraction(171, {171, 171}) == 0.0);
  }

  TEST_CASE("target_energy") {
    const auto e = builtin_resnet_only().energy_bounds();
    CHECK(e.e_low == 359.9321833);
    CHECK(e.e_high == 1238.147188);
    CHECK(target_energy(0.0, e, MappingDirection::prose) == 1238.147188);
    CHECK(target_energy(1.0, e, MappingDirection::literal) == 1238.147188);
    CHECK(target_energy(0.5, e, MappingDirection::prose) == doctest::Approx(799.03968565).epsilon(1e-12));
    CHECK(target_energy(0.5, e, MappingDirection::literal) ==
          doctest::Approx(799.03968565).epsilon(1e-12));
  }

  TEST_CASE("select_model") {
    const auto pool = builtin_resnet_only();
    CHECK(select_model(799.0396857, pool).name == "ResNet101");
    CHECK(select_model(359.9321833, pool).name == "ResNet34");
    const double mid = (359.9321833 + 420.6213298) / 2;
    CHECK(std::fabs(mid - 359.9321833) == std::fabs(420.6213298 - mid));
    CHECK(select_model(mid, pool).name == "ResNet34");
  }

  TEST_CASE("select_model: duplicate energies tie to the earlier profile") {
    const ModelPool pool({{"B", 10, 1}, {"A", 10, 2}, {"C", 20, 1}});
    CHECK(select_model(12, pool).name == "B");
  }

  TEST_CASE("select_model agrees with brute force on random targets") {
    std::mt19937_64 rng(7);
    for (const auto& pool : {builtin_table1(), builtin_resnet_only()}) {
      const auto e = pool.energy_bounds();
      std::uniform_real_distribution<double> target(e.e_low - 50, e.e_high + 50);
      for (int i = 0; i < 5000; ++i) {
        const double t = target(rng);
        CHECK(select_model(t, pool).name == brute_force(t, pool)->name);
      }
    }
  }

  TEST_CASE("decide composes the steps") {
    const auto pool = builtin_resnet_only();
    const auto h = history_of({100, 200});
    const auto d = decide(150, h, h.back().interval.start, pool, BoundsWindow::whole_trace(),
                          MappingDirection::prose);
    CHECK(d.fraction == 0.5);
    CHECK(d.e_target == doctest::Approx(799.04).epsilon(1e-6));
    CHECK(d.model == "ResNet101");
    REQUIRE(d.bounds.has_value());
    CHECK(d.bounds->c_low == 100.0);
    CHECK(d.bounds->c_high == 200.0);

    const auto flat = history_of({171, 171, 171});
    CHECK(decide(171, flat, flat.back().interval.start, pool, BoundsWindow::whole_trace(),
                 MappingDirection::prose)
              .model == "ResNet152");

    const auto above = decide(900, h, h.back().interval.start, pool, BoundsWindow::trailing(24h),
                              MappingDirection::prose);
    CHECK(above.fraction == 1.0);
    CHECK(above.model == "ResNet34");
  }

  TEST_CASE("boundaries for both pools and directions") {
    for (const auto& pool : {builtin_table1(), builtin_resnet_only()}) {
      const auto h = history_of({100, 200});
      const auto at = h.back().interval.start;
      const auto& lo = select_model(pool.energy_bounds().e_low, pool);
      const auto& hi = select_model(pool.energy_bounds().e_high, pool);
      const auto w = BoundsWindow::whole_trace();
      CHECK(decide(100, h, at, pool, w, MappingDirection::prose).model == hi.name);
      CHECK(decide(200, h, at, pool, w, MappingDirection::prose).model == lo.name);
      CHECK(decide(100, h, at, pool, w, MappingDirection::literal).model == lo.name);
      CHECK(decide(200, h, at, pool, w, MappingDirection::literal).model == hi.name);
    }
  }

  TEST_CASE("monotonicity under fixed bounds") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 600);
    for (const auto& pool : {builtin_table1(), builtin_resnet_only()}) {
      for (int i = 0; i < 2000; ++i) {
        double lo = u(rng), hi = u(rng);
        if (lo > hi) std::swap(lo, hi);
        double c1 = u(rng), c2 = u(rng);
        if (c1 > c2) std::swap(c1, c2);
        const IntensityBounds b{lo, hi};
        const auto e = pool.energy_bounds();
        const auto& p1 = select_model(target_energy(intensity_fraction(c1, b), e, MappingDirection::prose), pool);
        const auto& p2 = select_model(target_energy(intensity_fraction(c2, b), e, MappingDirection::prose), pool);
        CHECK(p1.energy_mj >= p2.energy_mj);
        const auto& l1 = select_model(target_energy(intensity_fraction(c1, b), e, MappingDirection::literal), pool);
        const auto& l2 = select_model(target_energy(intensity_fraction(c2, b), e, MappingDirection::literal), pool);
        CHECK(l1.energy_mj <= l2.energy_mj);
      }
    }
  }

  TEST_CASE("invariant under affine rescaling of intensities") {
    // Integer intensities with power-of-two scales keep every step exact.
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> c(0, 1000);
    std::uniform_int_distribution<int> offset(-100, 1000);
    const auto pool = builtin_table1();
    for (int i = 0; i < 500; ++i) {
      const double a_values[] = {0.5, 2.0, 4.0};
      const double a = a_values[i % 3];
      const double b = offset(rng);
      const double x = c(rng), y = c(rng), cur = c(rng);
      const auto h1 = history_of({x, y});
      const auto h2 = history_of({a * x + b, a * y + b});
      const auto at = h1.back().interval.start;
      for (auto dir : {MappingDirection::prose, MappingDirection::literal}) {
        const auto d1 = decide(cur, h1, at, pool, BoundsWindow::whole_trace(), dir);
        const auto d2 = decide(a * cur + b, h2, at, pool, BoundsWindow::whole_trace(), dir);
        CHECK(d1.fraction == d2.fraction);
        CHECK(d1.model == d2.model);
      }
    }
  }

  TEST_CASE("fraction and target stay in range") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1000);
    const auto pool = builtin_table1();
    const auto e = pool.energy_bounds();
    for (int i = 0; i < 2000; ++i) {
      const auto h = history_of({u(rng), u(rng), u(rng)});
      const auto d = decide(u(rng), h, h.back().interval.start, pool, BoundsWindow::trailing(24h),
                            i % 2 ? MappingDirection::prose : MappingDirection::literal);
      CHECK(d.fraction >= 0.0);
      CHECK(d.fraction <= 1.0);
      CHECK(d.e_target >= e.e_low);
      CHECK(d.e_target <= e.e_high);
      CHECK(pool.find(d.model) != nullptr);
    }
  }

  TEST_CASE("fixed policy") {
    const auto pool = builtin_resnet_only();
    const auto h = history_of({100, 900});
    const Policy p = fixed_policy("ResNet152", pool);
    for (double c : {0.0, 100.0, 500.0, 900.0}) {
      const auto d = decide(p, c, h, h.back().interval.start, pool);
      CHECK(d.model == "ResNet152");
      CHECK(d.e_target == 1238.147188);
      CHECK_FALSE(d.bounds.has_value());
    }
    CHECK(decide(Policy{fixed_policy("ResNet50", pool)}, 42, h, h.front().interval.start, pool).model ==
          "ResNet50");
    CHECK_THROWS_AS(fixed_policy("VGG16", pool), ConfigError);
  }

  TEST_CASE("parse_mapping and window labels") {
    CHECK(parse_mapping("prose") == MappingDirection::prose);
    CHECK(parse_mapping("literal") == MappingDirection::literal);
    CHECK_THROWS_AS(parse_mapping("inverse"), ConfigError);
    CHECK(to_string(BoundsWindow::whole_trace()) == "whole_trace");
    CHECK(to_string(BoundsWindow::trailing(24h)) == "trailing(24h)");
  }
}
