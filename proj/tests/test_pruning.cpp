#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "champ/pruning.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace champ;
using champ::test::short_finetune;
using champ::test::trained_toy;

namespace {

// Two-pass population std of the non-zero magnitudes.
double oracle_threshold(const std::vector<double>& mesh, double alpha) {
  std::vector<double> mags;
  for (double p : mesh) {
    if (p != 0.0) mags.push_back(std::abs(p));
  }
  if (mags.empty()) return 0.0;
  const double mean = std::accumulate(mags.begin(), mags.end(), 0.0) / mags.size();
  double ss = 0.0;
  for (double m : mags) ss += (m - mean) * (m - mean);
  return alpha * std::sqrt(ss / mags.size());
}

ScIpnn tiny_net() { return make_network(std::vector<int>{2, 2}, 2, kDefaultBias, 1); }

bool subset_of(const PruneMask& a, const PruneMask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.bits[i] == 1 && b.bits[i] == 0) return false;
  }
  return true;
}

void check_clamp(const ScIpnn& net, const PruneMask& mask) {
  const auto phases = phase_vector(net);
  REQUIRE(phases.size() == mask.size());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    CHECK((mask.bits[i] == 0) == (phases[i] == 0.0));
  }
}

}  // namespace

TEST_CASE("threshold_for_mesh") {
  const std::vector<double> mesh{0.1, -0.2, 0.3, 0.0, 0.0};
  CHECK(threshold_for_mesh(mesh, 1.0) == doctest::Approx(0.0816497).epsilon(1e-6));
  CHECK(threshold_for_mesh(mesh, 2.5) == doctest::Approx(oracle_threshold(mesh, 2.5)));
  CHECK(threshold_for_mesh(std::vector<double>{0.0, 0.0}, 3.0) == 0.0);
  CHECK(threshold_for_mesh(mesh, 0.0) == 0.0);
  CHECK_THROWS_AS(threshold_for_mesh(mesh, -1.0), std::invalid_argument);
}

TEST_CASE("apply_magnitude_prune") {
  SUBCASE("alpha 0 is a no-op") {
    const ScIpnn net = trained_toy().net;
    const auto [out, mask] = apply_magnitude_prune(net, 0.0);
    CHECK(out == net);
    CHECK(mask == PruneMask::all_ones(net.phase_count()));
  }
  SUBCASE("huge alpha prunes everything") {
    const auto [out, mask] = apply_magnitude_prune(trained_toy().net, 1e9);
    CHECK(sparsity(mask) == 100.0);
    for (double p : phase_vector(out)) CHECK(p == 0.0);
  }
  SUBCASE("per-mesh thresholds match the oracle") {
    ScIpnn net = make_network(std::vector<int>{4, 6, 3}, 3, kDefaultBias, 4);
    auto phases = phase_vector(net);
    const auto slices = mesh_slices(net);
    // Give each mesh its own scale so a global threshold would disagree.
    for (std::size_t m = 0; m < slices.size(); ++m) {
      for (std::size_t k = 0; k < slices[m].length; ++k) phases[slices[m].offset + k] *= std::pow(0.3, m);
    }
    set_phase_vector(net, phases);
    for (double alpha : {0.5, 1.0, 1.5}) {
      const auto [out, mask] = apply_magnitude_prune(net, alpha);
      const auto after = phase_vector(out);
      for (const auto& s : slices) {
        const std::vector<double> mesh(phases.begin() + s.offset, phases.begin() + s.offset + s.length);
        const double thr = oracle_threshold(mesh, alpha);
        for (std::size_t k = 0; k < s.length; ++k) {
          const bool pruned = std::abs(mesh[k]) < thr;
          CHECK(mask.bits[s.offset + k] == (pruned ? 0 : 1));
          CHECK(after[s.offset + k] == (pruned ? 0.0 : mesh[k]));
        }
      }
    }
  }
  SUBCASE("the comparison is strict") {
    ScIpnn net = tiny_net();
    auto phases = phase_vector(net);
    REQUIRE(phases.size() == 8);
    // mesh_v holds θ, φ, ψ0, ψ1: magnitudes {1, 3, 1, 3}, mean 2, std 1.
    phases[0] = 1.0;
    phases[1] = -3.0;
    phases[2] = 1.0;
    phases[3] = 3.0;
    set_phase_vector(net, phases);
    CHECK(threshold_for_mesh(std::span<const double>(phases.data(), 4), 1.0) == 1.0);
    const auto [a, at_std] = apply_magnitude_prune(net, 1.0);
    for (int k = 0; k < 4; ++k) CHECK(at_std.bits[k] == 1);
    const auto [b, above] = apply_magnitude_prune(net, 1.0 + 1e-12);
    CHECK(above.bits[0] == 0);
    CHECK(above.bits[1] == 1);
    CHECK(above.bits[2] == 0);
    CHECK(above.bits[3] == 1);
  }
  SUBCASE("prior zeros are kept and clamped") {
    const ScIpnn net = trained_toy().net;
    PruneMask prior = PruneMask::all_ones(net.phase_count());
    prior.bits[0] = 0;
    prior.bits[5] = 0;
    const auto [out, mask] = apply_magnitude_prune(net, 0.0, prior);
    CHECK(mask == prior);
    check_clamp(out, mask);
    CHECK_THROWS_AS(apply_magnitude_prune(net, 1.0, PruneMask::all_ones(3)), std::invalid_argument);
    CHECK_THROWS_AS(apply_magnitude_prune(net, -0.5), std::invalid_argument);
  }
  SUBCASE("larger alpha never lowers sparsity or raises mean phase") {
    const ScIpnn net = trained_toy().net;
    double last_sparsity = 0.0;
    double last_mean = mean_phase(net);
    PruneMask last_mask = PruneMask::all_ones(net.phase_count());
    for (double alpha = 0.0; alpha <= 3.0; alpha += 0.25) {
      const auto [out, mask] = apply_magnitude_prune(net, alpha);
      CHECK(sparsity(mask) >= last_sparsity);
      CHECK(mean_phase(out) <= last_mean);
      CHECK(subset_of(mask, last_mask));
      last_sparsity = sparsity(mask);
      last_mean = mean_phase(out);
      last_mask = mask;
    }
  }
}

TEST_CASE("sparsity and mean_phase") {
  PruneMask m{{1, 0, 1, 1, 0, 1, 1, 1, 1, 1, 0, 1}};
  CHECK(sparsity(m) == 25.0);
  CHECK_THROWS_AS(sparsity(PruneMask{}), std::invalid_argument);

  ScIpnn net = tiny_net();
  set_phase_vector(net, std::vector<double>{kPi / 2, 0.0, kPi, -kPi / 2, kPi / 2, 0.0, kPi, -kPi / 2});
  CHECK(mean_phase(net) == doctest::Approx(kPi / 2));
}

TEST_CASE("one_shot_prune") {
  const auto& toy = trained_toy();
  const PruneData data{toy.train, toy.eval};
  REQUIRE(toy.accuracy > 0.9);

  SUBCASE("alpha 0 is selected exactly when it meets acc_min") {
    OsConfig cfg{{0.0}, toy.accuracy, short_finetune(), 1};
    auto r = one_shot_prune(toy.net, cfg, data);
    REQUIRE(r.best);
    CHECK(r.best->net == toy.net);
    CHECK(r.best->report.accuracy == toy.accuracy);
    CHECK(r.best->report.epochs_finetuned == 0);
    CHECK(r.reports[0].accepted);

    cfg.acc_min = toy.accuracy + 0.01;
    r = one_shot_prune(toy.net, cfg, data);
    CHECK_FALSE(r.best);
    REQUIRE(r.reports.size() == 1);
    CHECK_FALSE(r.reports[0].accepted);
  }
  SUBCASE("winner follows the selection rule") {
    const OsConfig cfg{{0.0, 0.5, 1.0, 1.5, 2.0, 1e6}, toy.accuracy - 0.05, short_finetune(), 2};
    const auto r = one_shot_prune(toy.net, cfg, data);
    REQUIRE(r.reports.size() == cfg.alphas.size());
    CHECK(r.reports.back().ps_sparsity == 100.0);
    std::optional<std::size_t> want;
    for (std::size_t k = 0; k < r.reports.size(); ++k) {
      CHECK(r.reports[k].alpha == cfg.alphas[k]);
      if (r.reports[k].accuracy < cfg.acc_min) continue;
      if (!want) {
        want = k;
        continue;
      }
      const auto& a = r.reports[k];
      const auto& b = r.reports[*want];
      if (std::tie(a.ps_sparsity, a.accuracy) > std::tie(b.ps_sparsity, b.accuracy)) want = k;
    }
    REQUIRE(want);
    REQUIRE(r.best);
    CHECK(r.best->report.alpha == cfg.alphas[*want]);
    for (std::size_t k = 0; k < r.reports.size(); ++k) CHECK(r.reports[k].accepted == (k == *want));
    check_clamp(r.best->net, r.best->mask);
  }
  SUBCASE("ties go to the lower alpha") {
    const OsConfig cfg{{1e-9, 0.0}, 0.0, short_finetune(), 1};
    const auto r = one_shot_prune(toy.net, cfg, data);
    REQUIRE(r.reports[0].ps_sparsity == r.reports[1].ps_sparsity);
    REQUIRE(r.reports[0].accuracy == r.reports[1].accuracy);
    REQUIRE(r.best);
    CHECK(r.best->report.alpha == 0.0);
    CHECK(r.reports[1].accepted);
  }
  SUBCASE("results do not depend on the worker count") {
    OsConfig cfg{{0.5, 1.0, 1.5, 2.0}, 0.0, short_finetune(), 1};
    const auto one = one_shot_prune(toy.net, cfg, data);
    cfg.workers = 3;
    const auto three = one_shot_prune(toy.net, cfg, data);
    REQUIRE(one.best);
    REQUIRE(three.best);
    CHECK(one.best->net == three.best->net);
    CHECK(one.best->mask == three.best->mask);
    for (std::size_t k = 0; k < one.reports.size(); ++k) {
      CHECK(one.reports[k].accuracy == three.reports[k].accuracy);
      CHECK(one.reports[k].ps_sparsity == three.reports[k].ps_sparsity);
    }
  }
  SUBCASE("invalid alphas") {
    CHECK_THROWS_AS(one_shot_prune(toy.net, OsConfig{{}, 0.0, short_finetune(), 1}, data), std::invalid_argument);
    CHECK_THROWS_AS(one_shot_prune(toy.net, OsConfig{{-1.0}, 0.0, short_finetune(), 1}, data),
                    std::invalid_argument);
  }
}

TEST_CASE("iterative_prune") {
  const auto& toy = trained_toy();
  const PruneData data{toy.train, toy.eval};
  const PrunedModel start{toy.net, PruneMask::all_ones(toy.net.phase_count()), {}};

  SUBCASE("immediate stop returns the input") {
    ItConfig cfg;
    cfg.acc_min = 1.1;
    cfg.finetune = short_finetune();
    const auto r = iterative_prune(start, cfg, data);
    CHECK(r.final_model.net == toy.net);
    CHECK(r.final_model.mask == start.mask);
    REQUIRE(r.reports.size() == 1);
    CHECK_FALSE(r.reports[0].accepted);
  }
  SUBCASE("zero iterations") {
    ItConfig cfg;
    cfg.max_iters = 0;
    const auto r = iterative_prune(start, cfg, data);
    CHECK(r.reports.empty());
    CHECK(r.final_model.net == toy.net);
  }
  SUBCASE("sparsity grows, masks shrink and accuracy holds") {
    ItConfig cfg;
    cfg.alpha0 = 0.5;
    cfg.delta_alpha = 0.5;
    cfg.acc_min = toy.accuracy - 0.05;
    cfg.finetune = short_finetune();
    cfg.max_iters = 12;
    const auto r = iterative_prune(start, cfg, data);
    REQUIRE_FALSE(r.reports.empty());
    CHECK(r.reports.size() <= 12);
    double last = 0.0;
    for (std::size_t k = 0; k < r.reports.size(); ++k) {
      CHECK(r.reports[k].alpha == doctest::Approx(0.5 + 0.5 * (k + 1)));
      CHECK(r.reports[k].ps_sparsity >= last);
      last = r.reports[k].ps_sparsity;
      CHECK(r.reports[k].accepted == (r.reports[k].accuracy >= cfg.acc_min));
      if (k + 1 < r.reports.size()) CHECK(r.reports[k].accepted);
    }
    CHECK(r.final_model.report.accuracy >= cfg.acc_min);
    CHECK(sparsity(r.final_model.mask) > 0.0);
    check_clamp(r.final_model.net, r.final_model.mask);
  }
  SUBCASE("invalid step") {
    ItConfig cfg;
    cfg.delta_alpha = 0.0;
    CHECK_THROWS_AS(iterative_prune(start, cfg, data), std::invalid_argument);
  }
}

TEST_CASE("champ pipeline") {
  const auto& toy = trained_toy();
  const PruneData data{toy.train, toy.eval};
  ItConfig it;
  it.delta_alpha = 0.5;
  it.acc_min = toy.accuracy - 0.05;
  it.finetune = short_finetune();
  it.max_iters = 8;

  SUBCASE("alpha 0 reduces to iterative pruning from the unpruned model") {
    const OsConfig os{{0.0}, toy.accuracy - 0.05, short_finetune(), 1};
    const auto c = champ::champ(toy.net, os, it, data);
    REQUIRE(c.oneshot_winner);
    CHECK(c.oneshot_winner->net == toy.net);
    CHECK(c.oneshot_winner->report.ps_sparsity == 0.0);
    const auto direct = iterative_prune(*c.oneshot_winner, it, data);
    REQUIRE(c.final_model);
    CHECK(c.final_model->net == direct.final_model.net);
    CHECK(c.iterative_reports.size() == direct.reports.size());
  }
  SUBCASE("trail and final model") {
    const OsConfig os{{1.0, 1.5, 2.0}, toy.accuracy - 0.05, short_finetune(), 2};
    const auto c = champ::champ(toy.net, os, it, data);
    const auto trail = c.trail();
    REQUIRE(trail.size() == 1 + 3 + c.iterative_reports.size());
    CHECK(trail[0].stage == PruneStage::baseline);
    CHECK(trail[0].accuracy == toy.accuracy);
    CHECK(trail[0].ps_sparsity == 0.0);
    for (int k = 1; k <= 3; ++k) CHECK(trail[k].stage == PruneStage::oneshot);
    for (std::size_t k = 4; k < trail.size(); ++k) CHECK(trail[k].stage == PruneStage::iterative);
    REQUIRE(c.qualified());
    CHECK(c.final_model->report.accuracy >= os.acc_min);
    CHECK(sparsity(c.final_model->mask) >= c.oneshot_winner->report.ps_sparsity);
    CHECK(subset_of(c.final_model->mask, c.oneshot_winner->mask));
    check_clamp(c.final_model->net, c.final_model->mask);
  }
  SUBCASE("no qualifying candidate") {
    const OsConfig os{{1.0}, 1.1, short_finetune(), 1};
    const auto c = champ::champ(toy.net, os, it, data);
    CHECK_FALSE(c.qualified());
    CHECK_FALSE(c.oneshot_winner);
    CHECK(c.iterative_reports.empty());
    CHECK(c.trail().size() == 2);
  }
}
