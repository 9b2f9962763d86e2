#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "doctest.h"
#include "rodeo/config.hpp"
#include "rodeo/ensemble_engine.hpp"
#include "rodeo/errors.hpp"
#include "rodeo/observables.hpp"

using rodeo::cplx;
using rodeo::CMatrix;
using rodeo::CVector;
using rodeo::MasterEquation;
using rodeo::TrajectoryConfig;
using rodeo::TransformationStrategy;

namespace {

MasterEquation dephasing_rate(double gamma) {
  return MasterEquation(
      2, {}, {{rodeo::CoefficientFn::constant(gamma), rodeo::sigma_z()}});
}

long count_of(const rodeo::EnsembleState& st, int id) {
  for (const auto& c : st.classes)
    if (c.id == id) return c.count;
  return -1;
}

}  // namespace

TEST_CASE("reverse jumps move the expected member counts") {
  auto me = dephasing_rate(-0.3);
  CVector plus = rodeo::named_state("plus");
  CVector minus = rodeo::named_state("minus");

  // E[minus -> plus] = 8000 * 0.3 * 0.01 = 24 per step,
  // E[plus -> minus] = 2000 * 0.3 * 0.01 = 6 per step.
  const int reps = 200;
  double sum_to_plus = 0.0, sum_to_minus = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    auto st = rodeo::make_ensemble(me, plus, 10000);
    st.classes[0].count = 8000;
    int minus_id = st.add_class(minus, 2000);

    rodeo::step_ensemble(me, TransformationStrategy::zero(), st, 0.0, 0.01,
                         static_cast<std::uint64_t>(rep), 0.1);

    CHECK(st.direct_jumps == 0);
    long plus_after = count_of(st, 0);
    long minus_after = count_of(st, minus_id);
    CHECK(plus_after + minus_after == 10000);

    long net = plus_after - 8000;           // X - Y
    long total = st.reverse_jumps;          // X + Y
    sum_to_plus += 0.5 * static_cast<double>(total + net);
    sum_to_minus += 0.5 * static_cast<double>(total - net);

    // pure drift leaves the class representatives in place
    for (const auto& c : st.classes) {
      double f = std::max(rodeo::fidelity(c.representative, plus),
                          rodeo::fidelity(c.representative, minus));
      CHECK(f > 1.0 - 1e-12);
    }
  }
  CHECK(std::abs(sum_to_plus / reps - 24.0) < 2.0);
  CHECK(std::abs(sum_to_minus / reps - 6.0) < 1.0);
}

TEST_CASE("a negative rate with no populated source class is a breakdown") {
  auto me = dephasing_rate(-0.3);
  CVector plus = rodeo::named_state("plus");
  CVector minus = rodeo::named_state("minus");

  auto st = rodeo::make_ensemble(me, plus, 1000);
  try {
    rodeo::step_ensemble(me, TransformationStrategy::zero(), st, 0.25, 0.01, 1, 0.1);
    FAIL("expected BreakdownError");
  } catch (const rodeo::BreakdownError& e) {
    CHECK(e.event().time == 0.25);
    CHECK(e.event().rate == doctest::Approx(-0.3));
    CHECK(e.event().source_class == 0);
    CHECK(rodeo::fidelity(e.event().missing_target, minus) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("run_nmqj reports a breakdown and truncates the record") {
  auto me = dephasing_rate(-0.3);
  CVector plus = rodeo::named_state("plus");
  TrajectoryConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 1.0;
  cfg.n_traj = 500;
  cfg.seed = 3;

  auto res = rodeo::run_nmqj(me, TransformationStrategy::zero(), plus, cfg);
  REQUIRE(res.breakdown.has_value());
  CHECK(res.breakdown->time == 0.0);
  CHECK(res.breakdown->rate == doctest::Approx(-0.3));
  CHECK(res.ensemble.times.size() == 1);
  CHECK(res.populations.size() == 1);
  CHECK(res.n_classes.size() == 1);
  CHECK(res.n_classes[0] == 1);
  CHECK(res.reverse_jumps == 0);
  CHECK(res.direct_jumps == 0);
}

TEST_CASE("ensemble run splits into the expected class structure") {
  auto me = rodeo::make_preset("pauli_isotropic");
  CVector plus = rodeo::named_state("plus");
  CVector zero = rodeo::named_state("zero");
  CVector one = rodeo::named_state("one");
  CVector e0 = {cplx(1.0), cplx(0.0)};
  CVector e1 = {cplx(0.0), cplx(1.0)};
  auto strat = TransformationStrategy::target_basis(e0, e1);

  TrajectoryConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 0.3;
  cfg.n_traj = 2000;
  cfg.seed = 19;

  auto res = rodeo::run_nmqj(me, strat, plus, cfg);
  CHECK(!res.breakdown.has_value());
  REQUIRE(res.ensemble.times.size() == 301);
  CHECK(res.reverse_jumps == 0);
  CHECK(res.direct_jumps > 0);

  // the equator class plus the two basis classes
  CHECK(res.n_classes.back() == 3);
  REQUIRE(res.final_classes.size() == 3);
  bool has_zero = false, has_one = false;
  long members = 0;
  for (const auto& c : res.final_classes) {
    members += c.count;
    if (rodeo::fidelity(c.representative, zero) > 1.0 - 1e-10) has_zero = true;
    if (rodeo::fidelity(c.representative, one) > 1.0 - 1e-10) has_one = true;
  }
  CHECK(members == 2000);
  CHECK(has_zero);
  CHECK(has_one);

  // population tables are ascending in id and conserve membership
  for (const auto& snapshot : res.populations) {
    long total = 0;
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
      total += snapshot[i].second;
      CHECK(snapshot[i].second > 0);
      if (i > 0) CHECK(snapshot[i].first > snapshot[i - 1].first);
    }
    CHECK(total == 2000);
  }

  // z stays balanced on average
  auto series = rodeo::bloch_series(res.ensemble);
  for (std::size_t k = 0; k < series.times.size(); k += 50)
    CHECK(std::abs(series.z[k]) <= 5.0 * series.se_z[k] + 0.02);
}

TEST_CASE("ensemble runs are reproducible by seed") {
  auto me = rodeo::make_preset("pauli_isotropic");
  CVector plus = rodeo::named_state("plus");
  auto strat = TransformationStrategy::zero();
  TrajectoryConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 0.2;
  cfg.n_traj = 500;
  cfg.seed = 21;

  auto a = rodeo::run_nmqj(me, strat, plus, cfg);
  auto b = rodeo::run_nmqj(me, strat, plus, cfg);
  CHECK(a.populations == b.populations);
  CHECK(a.direct_jumps == b.direct_jumps);

  cfg.seed = 22;
  auto c = rodeo::run_nmqj(me, strat, plus, cfg);
  CHECK(a.populations != c.populations);
}

TEST_CASE("empty classes are retained for a grace window then purged") {
  auto me = dephasing_rate(0.0);  // no events, pure bookkeeping
  CVector plus = rodeo::named_state("plus");
  CVector zero = rodeo::named_state("zero");

  auto st = rodeo::make_ensemble(me, plus, 100);
  st.add_class(zero, 0);
  REQUIRE(st.classes.size() == 2);

  for (int k = 0; k < 100; ++k)
    rodeo::step_ensemble(me, TransformationStrategy::zero(), st, 1e-3 * k, 1e-3, 5, 0.1);
  CHECK(st.classes.size() == 2);  // still inside the retention window

  rodeo::step_ensemble(me, TransformationStrategy::zero(), st, 0.1, 1e-3, 5, 0.1);
  CHECK(st.classes.size() == 1);
  CHECK(st.classes[0].count == 100);
  CHECK(st.registry.size() == 2);  // the registry never forgets
}

TEST_CASE("populated classes that drift together merge") {
  auto me = dephasing_rate(0.0);
  CVector plus = rodeo::named_state("plus");
  CVector near_plus = {cplx(std::sqrt(0.5)), cplx(std::sqrt(0.5) + 1e-6)};
  rodeo::normalize(near_plus);
  REQUIRE(rodeo::fidelity(plus, near_plus) > 1.0 - 1e-8);

  auto st = rodeo::make_ensemble(me, plus, 100);
  st.classes[0].count = 60;
  st.add_class(near_plus, 40);
  REQUIRE(st.populated_count() == 2);

  rodeo::step_ensemble(me, TransformationStrategy::zero(), st, 0.0, 1e-3, 9, 0.1);
  CHECK(st.populated_count() == 1);
  CHECK(count_of(st, 0) == 100);
}

TEST_CASE("oversized per-member event probability stops the ensemble") {
  auto me = rodeo::make_preset("pauli_isotropic");
  CVector plus = rodeo::named_state("plus");
  TrajectoryConfig cfg;
  cfg.dt = 0.05;  // rate trace is 3: total probability 0.15 per member
  cfg.t_max = 0.5;
  cfg.n_traj = 100;
  CHECK_THROWS_AS(rodeo::run_nmqj(me, TransformationStrategy::zero(), plus, cfg),
                  rodeo::StepTooLarge);
}

TEST_CASE("ensemble input validation") {
  auto me = rodeo::make_preset("dephasing");
  CVector plus = rodeo::named_state("plus");
  CHECK_THROWS_AS(rodeo::make_ensemble(me, plus, 1), rodeo::Error);
  CVector wrong_dim = {cplx(1.0), cplx(0.0), cplx(0.0)};
  CHECK_THROWS_AS(rodeo::make_ensemble(me, wrong_dim, 100), rodeo::DimensionMismatch);
  CVector not_unit = {cplx(0.9), cplx(0.0)};
  CHECK_THROWS_AS(rodeo::make_ensemble(me, not_unit, 100), rodeo::Error);

  TrajectoryConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(rodeo::run_nmqj(me, TransformationStrategy::zero(), plus, cfg),
                  rodeo::StepTooLarge);
}
