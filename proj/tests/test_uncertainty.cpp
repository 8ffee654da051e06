#include <cmath>
#include <random>

#include "champ/pruning.hpp"
#include "champ/uncertainty.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace champ;
using champ::test::trained_toy;

namespace {

UncertaintyConfig mc_config(double sigma, GatingMode mode, int iterations, int workers = 1) {
  UncertaintyConfig cfg;
  cfg.sigma_ps = sigma;
  cfg.iterations = iterations;
  cfg.mode = mode;
  cfg.seed = 77;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

TEST_CASE("gating mode names") {
  CHECK(to_string(GatingMode::power_gated) == "power_gated");
  CHECK(gating_mode_from_string("removed") == GatingMode::removed);
  CHECK_THROWS_AS(gating_mode_from_string("gated"), std::invalid_argument);
}

TEST_CASE("perturb") {
  const ScIpnn& net = trained_toy().net;
  const auto [pruned, mask] = apply_magnitude_prune(net, 1.0);
  REQUIRE(mask.zero_count() > 0);

  SUBCASE("zero noise returns the network unchanged") {
    std::mt19937_64 rng(1);
    CHECK(perturb(pruned, mask, 0.0, GatingMode::power_gated, rng) == pruned);
    CHECK(perturb(pruned, mask, 0.0, GatingMode::removed, rng) == pruned);
  }
  SUBCASE("removed mode leaves pruned phases at zero") {
    std::mt19937_64 rng(2);
    const auto noisy = phase_vector(perturb(pruned, mask, 0.1, GatingMode::removed, rng));
    const auto clean = phase_vector(pruned);
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      if (mask.bits[i] == 0) {
        CHECK(noisy[i] == 0.0);
      } else {
        CHECK(noisy[i] != clean[i]);
      }
    }
  }
  SUBCASE("power-gated mode perturbs pruned phases too") {
    std::mt19937_64 rng(3);
    const auto noisy = phase_vector(perturb(pruned, mask, 0.1, GatingMode::power_gated, rng));
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      CHECK(noisy[i] != 0.0);
      CHECK(noisy[i] > -kPi);
      CHECK(noisy[i] <= kPi);
    }
  }
  SUBCASE("modes agree on an unpruned mask") {
    const auto ones = PruneMask::all_ones(net.phase_count());
    std::mt19937_64 a(4);
    std::mt19937_64 b(4);
    CHECK(perturb(net, ones, 0.05, GatingMode::power_gated, a) == perturb(net, ones, 0.05, GatingMode::removed, b));
  }
  SUBCASE("gains are untouched") {
    std::mt19937_64 rng(5);
    const ScIpnn noisy = perturb(net, PruneMask::all_ones(net.phase_count()), 0.2, GatingMode::power_gated, rng);
    for (std::size_t l = 0; l < net.layers.size(); ++l) CHECK(noisy.layers[l].gain_params == net.layers[l].gain_params);
  }
  SUBCASE("noise has standard deviation sigma times pi") {
    const double sigma = 0.05;
    ScIpnn zero = net;
    set_phase_vector(zero, std::vector<double>(net.phase_count(), 0.0));
    const PruneMask none{std::vector<std::uint8_t>(net.phase_count(), 0)};
    std::mt19937_64 rng(6);
    double sum = 0.0;
    double sum2 = 0.0;
    std::size_t n = 0;
    while (n < 100000) {
      for (double p : phase_vector(perturb(zero, none, sigma, GatingMode::power_gated, rng))) {
        sum += p;
        sum2 += p * p;
        ++n;
      }
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sum2 - n * mean * mean) / (n - 1));
    CHECK(std::abs(sd - sigma * kPi) < 0.02 * sigma * kPi);
    CHECK(std::abs(mean) < 5.0 * sigma * kPi / std::sqrt(static_cast<double>(n)));
  }
  SUBCASE("errors") {
    std::mt19937_64 rng(7);
    CHECK_THROWS_AS(perturb(net, PruneMask::all_ones(2), 0.1, GatingMode::removed, rng), std::invalid_argument);
    CHECK_THROWS_AS(perturb(net, mask, -0.1, GatingMode::removed, rng), std::invalid_argument);
  }
}

TEST_CASE("monte_carlo_accuracy") {
  const auto& toy = trained_toy();
  const auto ones = PruneMask::all_ones(toy.net.phase_count());

  SUBCASE("zero noise reproduces the deterministic accuracy") {
    const auto r = monte_carlo_accuracy(toy.net, ones, toy.eval, mc_config(0.0, GatingMode::power_gated, 20));
    CHECK(r.mean_accuracy == toy.accuracy);
    CHECK(r.std_accuracy == 0.0);
    CHECK(r.iterations == 20);
    CHECK(r.standard_error() == 0.0);
  }
  SUBCASE("reproducible and independent of the worker count") {
    const auto a = monte_carlo_accuracy(toy.net, ones, toy.eval, mc_config(0.1, GatingMode::removed, 40, 1));
    const auto b = monte_carlo_accuracy(toy.net, ones, toy.eval, mc_config(0.1, GatingMode::removed, 40, 3));
    const auto c = monte_carlo_accuracy(toy.net, ones, toy.eval, mc_config(0.1, GatingMode::removed, 40, 1));
    CHECK(a.mean_accuracy == b.mean_accuracy);
    CHECK(a.std_accuracy == b.std_accuracy);
    CHECK(a.mean_accuracy == c.mean_accuracy);
  }
  SUBCASE("modes are identical on an unpruned model") {
    const auto pg = monte_carlo_accuracy(toy.net, ones, toy.eval, mc_config(0.1, GatingMode::power_gated, 30));
    const auto rm = monte_carlo_accuracy(toy.net, ones, toy.eval, mc_config(0.1, GatingMode::removed, 30));
    CHECK(pg.mean_accuracy == rm.mean_accuracy);
    CHECK(pg.std_accuracy == rm.std_accuracy);
  }
  SUBCASE("accuracy degrades with noise") {
    double last = toy.accuracy;
    double last_se = 0.0;
    for (double sigma : {0.02, 0.1, 0.3, 0.6}) {
      const auto r = monte_carlo_accuracy(toy.net, ones, toy.eval, mc_config(sigma, GatingMode::power_gated, 100));
      CHECK(r.mean_accuracy <= last + 2.0 * std::hypot(r.standard_error(), last_se));
      CHECK(r.std_accuracy >= 0.0);
      last = r.mean_accuracy;
      last_se = r.standard_error();
    }
    CHECK(last < toy.accuracy - 0.2);
  }
  SUBCASE("standard error") {
    McResult r;
    r.std_accuracy = 0.2;
    r.iterations = 100;
    CHECK(r.standard_error() == doctest::Approx(0.02));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(monte_carlo_accuracy(toy.net, ones, Dataset{}, mc_config(0.1, GatingMode::removed, 5)),
                    std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_accuracy(toy.net, ones, toy.eval, mc_config(0.1, GatingMode::removed, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(monte_carlo_accuracy(toy.net, PruneMask::all_ones(1), toy.eval,
                                         mc_config(0.1, GatingMode::removed, 5)),
                    std::invalid_argument);
  }
}
