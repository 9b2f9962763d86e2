// Acceptance gate. Every case prints exactly one summary line
//   criterion N: PASS|FAIL
// on stdout; the doctest assertions underneath carry the diagnostics.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rodeo/config.hpp"
#include "rodeo/ensemble_engine.hpp"
#include "rodeo/exact.hpp"
#include "rodeo/jump_engine.hpp"
#include "rodeo/master_equation.hpp"
#include "rodeo/observables.hpp"
#include "rodeo/rate_operator.hpp"
#include "rodeo/rng.hpp"
#include "rodeo/runner.hpp"

using rodeo::cplx;
using rodeo::CMatrix;
using rodeo::CVector;
using rodeo::MasterEquation;
using rodeo::TrajectoryConfig;
using rodeo::TransformationStrategy;

namespace {

bool report(int n, bool ok) {
  std::printf("criterion %d: %s\n", n, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  return ok;
}

int bench_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw < 1) hw = 1;
  if (hw > 8) hw = 8;
  return static_cast<int>(hw);
}

CVector haar_state(rodeo::RngStream& rng, int d) {
  CVector v(static_cast<std::size_t>(d));
  for (auto& x : v) x = cplx(rng.next_normal(), rng.next_normal());
  rodeo::normalize(v);
  return v;
}

CMatrix random_hermitian(rodeo::RngStream& rng, int d) {
  CMatrix a(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(rng.next_normal(), rng.next_normal());
  CMatrix h = a;
  h += a.adjoint();
  h *= 0.5;
  return h;
}

MasterEquation random_model(rodeo::RngStream& rng, int d, int n_channels) {
  std::vector<rodeo::HamiltonianTerm> h;
  h.push_back({rodeo::CoefficientFn::constant(1.0), random_hermitian(rng, d)});
  std::vector<std::pair<rodeo::CoefficientFn, CMatrix>> ch;
  for (int k = 0; k < n_channels; ++k) {
    CMatrix l(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) l(i, j) = cplx(rng.next_normal(), rng.next_normal());
    double rate = 2.0 * rng.next_double() - 1.0;
    ch.emplace_back(rodeo::CoefficientFn::constant(rate), l);
  }
  return MasterEquation(d, std::move(h), std::move(ch));
}

// -i(Kt P - P Kt^dag) + R - tr(R) P, the mean single-step change rate.
CMatrix mean_evolution(const CMatrix& k_tilde, const CMatrix& r, const CVector& psi) {
  CMatrix p = rodeo::projector(psi);
  CMatrix kp = k_tilde * p;
  CMatrix pk = p * k_tilde.adjoint();
  kp -= pk;
  kp *= cplx(0.0, -1.0);
  kp += r;
  CMatrix tp = p;
  tp *= r.trace();
  kp -= tp;
  return kp;
}

// Largest entry of (mean evolution) - (generator applied to the projector)
// for one model/state draw, both for R itself and for R rebuilt from the
// split rates.
std::pair<double, double> identity_residuals(const MasterEquation& me, double t,
                                             const CVector& psi,
                                             const TransformationStrategy& strategy) {
  auto op = rodeo::build_rate_operator(me, t, psi, strategy);
  auto eff = rodeo::effective_hamiltonian(me, t, psi, strategy);
  CMatrix want = rodeo::generator_apply(me, t, rodeo::projector(psi));

  CMatrix got = mean_evolution(eff.k_tilde, op.matrix, psi);
  got -= want;
  double r1 = got.max_abs();

  int d = me.dim();
  CMatrix rebuilt(d);
  for (int i = 0; i < d; ++i) {
    double lam = op.lambda_plus[static_cast<std::size_t>(i)] -
                 op.lambda_minus[static_cast<std::size_t>(i)];
    rebuilt.add_outer(lam, op.spectral.eigenvectors[static_cast<std::size_t>(i)],
                      op.spectral.eigenvectors[static_cast<std::size_t>(i)]);
  }
  CMatrix got2 = mean_evolution(eff.k_tilde, rebuilt, psi);
  got2 -= want;
  double r2 = got2.max_abs();
  return {r1, r2};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct DirGuard {
  std::filesystem::path path;
  explicit DirGuard(std::string p) : path(std::move(p)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~DirGuard() { std::filesystem::remove_all(path); }
};

}  // namespace

// ---------------------------------------------------------------------------
// 1. Direct jump ensemble vs. the integrated solution, isotropic qubit.

TEST_CASE("jump ensemble matches the exact isotropic solution within noise") {
  auto me = rodeo::make_preset("pauli_isotropic");
  CVector psi = rodeo::named_state("plus");

  TrajectoryConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 3.0;
  cfg.n_traj = 10000;
  cfg.seed = 20240817;
  cfg.threads = bench_threads();

  auto t0 = std::chrono::steady_clock::now();
  auto jump = rodeo::run_jump_ensemble(me, TransformationStrategy::zero(), psi, cfg);
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  auto exact = rodeo::evolve_exact(me, rodeo::projector(psi), cfg.dt, cfg.t_max);
  auto rep = rodeo::compare(rodeo::bloch_series(exact), rodeo::bloch_series(jump.ensemble),
                            0.02, 5.0);

  CHECK(rep.n_points == 3001);
  CHECK(rep.pass);
  CHECK(rep.n_failures == 0);
  CHECK(elapsed < 60.0);
  MESSAGE("ensemble wall time ", elapsed, " s, max deviation ", rep.max_dev, " at t=",
          rep.max_dev_time);
  CHECK(report(1, rep.pass && elapsed < 60.0));
}

// ---------------------------------------------------------------------------
// 2. Dephasing coherence decay hits exp(-2t) at t = 1.

TEST_CASE("dephasing coherence at t=1 agrees with exp(-2) for both solvers") {
  auto me = rodeo::make_preset("dephasing");
  CVector psi = rodeo::named_state("plus");
  const double want = std::exp(-2.0);

  TrajectoryConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 1.0;
  cfg.n_traj = 10000;
  cfg.seed = 4242;
  cfg.threads = bench_threads();
  auto jump = rodeo::run_jump_ensemble(me, TransformationStrategy::zero(), psi, cfg);
  auto mc = rodeo::bloch_series(jump.ensemble);

  auto exact = rodeo::evolve_exact(me, rodeo::projector(psi), cfg.dt, cfg.t_max);
  auto ex = rodeo::bloch_series(exact);

  std::size_t k = mc.times.size() - 1;
  REQUIRE(mc.times[k] == doctest::Approx(1.0).epsilon(1e-12));
  double mc_dev = std::abs(mc.x[k] - want);
  double ex_dev = std::abs(ex.x[k] - want);
  CHECK(mc_dev <= 3.0 * mc.se_x[k]);
  CHECK(ex_dev <= 1e-6);
  MESSAGE("mc x(1)=", mc.x[k], " +- ", mc.se_x[k], ", exact deviation ", ex_dev);
  CHECK(report(2, mc_dev <= 3.0 * mc.se_x[k] && ex_dev <= 1e-6));
}

// ---------------------------------------------------------------------------
// 3. Ensemble engine on the non-P-divisible demo model with the target-basis
//    transformation: reverse jumps fire, the class structure stays at three
//    members, and the averages still track the exact solution.

TEST_CASE("ensemble engine handles the non-P-divisible demo model") {
  auto me = rodeo::make_preset("pauli_nonPdiv_demo");
  CVector psi = rodeo::named_state("plus");
  CVector zero = rodeo::named_state("zero");
  CVector one = rodeo::named_state("one");
  auto strategy = TransformationStrategy::target_basis(zero, one);

  TrajectoryConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 1.5;
  cfg.n_traj = 10000;
  cfg.seed = 90210;
  auto res = rodeo::run_nmqj(me, strategy, psi, cfg);

  bool ok = !res.breakdown.has_value();
  CHECK(!res.breakdown.has_value());
  CHECK(res.reverse_jumps > 0);
  ok = ok && res.reverse_jumps > 0;
  CHECK(res.direct_jumps > 0);

  // The model loses P-divisibility partway through the window: some grid
  // times must show a negative pairwise rate sum, and none before ~0.886.
  std::vector<double> violated;
  for (double t : res.ensemble.times) {
    double gx = me.channels()[0].rate(t);
    double gy = me.channels()[1].rate(t);
    double gz = me.channels()[2].rate(t);
    auto pdiv = rodeo::pauli_p_divisibility(gx, gy, gz);
    if (!pdiv.divisible) violated.push_back(t);
  }
  CHECK(!violated.empty());
  ok = ok && !violated.empty();
  if (!violated.empty()) {
    CHECK(violated.front() == doctest::Approx(0.887).epsilon(2e-3));
    CHECK(violated.back() == doctest::Approx(1.5).epsilon(1e-9));
  }

  // Exactly three populated classes at the end: the drifted equator state
  // plus the two basis poles.
  CHECK(res.n_classes.back() == 3);
  CHECK(res.final_classes.size() == 3);
  ok = ok && res.final_classes.size() == 3;
  if (res.final_classes.size() == 3) {
    long total = 0;
    int found_zero = 0, found_one = 0, found_equator = 0;
    // Phase of the drifted equator state: 2t + 1 - cos t at t = 1.5.
    double theta = 2.0 * 1.5 + 1.0 - std::cos(1.5);
    CVector equator = {std::polar(std::sqrt(0.5), -theta / 2.0),
                       std::polar(std::sqrt(0.5), theta / 2.0)};
    for (const auto& c : res.final_classes) {
      total += c.count;
      if (rodeo::fidelity(c.representative, zero) > 1.0 - 1e-9) ++found_zero;
      else if (rodeo::fidelity(c.representative, one) > 1.0 - 1e-9) ++found_one;
      else if (rodeo::fidelity(c.representative, equator) > 1.0 - 1e-5) ++found_equator;
    }
    CHECK(total == cfg.n_traj);
    CHECK(found_zero == 1);
    CHECK(found_one == 1);
    CHECK(found_equator == 1);
    ok = ok && total == cfg.n_traj && found_zero == 1 && found_one == 1 &&
         found_equator == 1;
  }

  auto exact = rodeo::evolve_exact(me, rodeo::projector(psi), cfg.dt, cfg.t_max);
  auto rep = rodeo::compare(rodeo::bloch_series(exact), rodeo::bloch_series(res.ensemble),
                            0.02, 5.0);
  CHECK(rep.pass);
  MESSAGE("reverse jumps ", res.reverse_jumps, ", max deviation ", rep.max_dev);
  CHECK(report(3, ok && rep.pass));
}

// ---------------------------------------------------------------------------
// 4. Mean-evolution identity: the drift/jump pieces reassemble the generator
//    for random models, including the split-rate reconstruction.

TEST_CASE("mean evolution identity holds for random models") {
  double worst = 0.0, worst_split = 0.0;
  for (int i = 0; i < 100; ++i) {
    rodeo::RngStream rng(777, static_cast<std::uint64_t>(i));
    int d = 2 + (i % 3);
    auto me = random_model(rng, d, 3);
    CVector psi = haar_state(rng, d);
    auto [r1, r2] = identity_residuals(me, 0.37, psi, TransformationStrategy::zero());
    worst = std::max(worst, r1);
    worst_split = std::max(worst_split, r2);
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_split <= 1e-10);
  MESSAGE("worst residual ", worst, ", split-rate variant ", worst_split);
  CHECK(report(4, worst <= 1e-10 && worst_split <= 1e-10));
}

// ---------------------------------------------------------------------------
// 5. The same identity holds for every transformation choice on shared draws.

TEST_CASE("mean evolution identity is transformation independent") {
  std::vector<TransformationStrategy> strategies = {
      TransformationStrategy::zero(),
      TransformationStrategy::state_scaled(cplx(0.8, -0.3)),
      TransformationStrategy::target_basis(rodeo::named_state("zero"),
                                           rodeo::named_state("one")),
  };
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    rodeo::RngStream rng(778, static_cast<std::uint64_t>(i));
    auto me = random_model(rng, 2, 3);
    CVector psi = haar_state(rng, 2);
    for (const auto& s : strategies) {
      auto [r1, r2] = identity_residuals(me, 1.25, psi, s);
      worst = std::max(worst, std::max(r1, r2));
    }
  }
  CHECK(worst <= 1e-10);
  MESSAGE("worst residual over strategies ", worst);
  CHECK(report(5, worst <= 1e-10));
}

// ---------------------------------------------------------------------------
// 6. Breakdown witness: the unphysical dephasing model trips it immediately
//    for every transformation, matching the exact positivity loss, and no
//    healthy preset ever trips it.

TEST_CASE("breakdown witness fires exactly when positivity is lost") {
  auto bad = rodeo::make_preset("unphysical_dephasing");
  CVector psi = rodeo::named_state("plus");
  CVector minus = rodeo::named_state("minus");

  std::vector<TransformationStrategy> strategies = {
      TransformationStrategy::zero(),
      TransformationStrategy::state_scaled(cplx(1.0, 0.0)),
      TransformationStrategy::target_basis(rodeo::named_state("zero"),
                                           rodeo::named_state("one")),
  };
  bool ok = true;
  for (std::size_t si = 0; si < strategies.size(); ++si) {
    TrajectoryConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 0.05;
    cfg.n_traj = 2000;
    cfg.seed = 11;
    auto res = rodeo::run_nmqj(bad, strategies[si], psi, cfg);
    bool fired = res.breakdown.has_value();
    CHECK(fired);
    ok = ok && fired;
    if (fired) {
      bool early = res.breakdown->time <= 2.0 * cfg.dt + 1e-12;
      CHECK(early);
      CHECK(res.breakdown->rate < 0.0);
      // The reported target must be a state nobody occupies. For the zero
      // and state-scaled rules it is |->; the target-basis rule makes the
      // rate operator degenerate there, so any basis pole is reported.
      bool unpopulated = rodeo::fidelity(res.breakdown->missing_target, psi) < 1.0 - 1e-8;
      CHECK(unpopulated);
      if (si < 2) {
        CHECK(rodeo::fidelity(res.breakdown->missing_target, minus) > 1.0 - 1e-9);
        unpopulated =
            unpopulated && rodeo::fidelity(res.breakdown->missing_target, minus) > 1.0 - 1e-9;
      }
      ok = ok && early && res.breakdown->rate < 0.0 && unpopulated;
    }
  }

  // The exact state really does leave the physical set right away.
  auto traj = rodeo::evolve_exact(bad, rodeo::projector(psi), 1e-3, 1.0);
  auto mon = rodeo::positivity_monitor(traj);
  bool all_negative = true;
  for (std::size_t k = 1; k < mon.mu.size(); ++k) all_negative = all_negative && mon.mu[k] < 0.0;
  CHECK(all_negative);
  CHECK(std::abs(mon.mu[0]) <= 1e-12);
  REQUIRE(mon.first_violation_time.has_value());
  CHECK(*mon.first_violation_time == doctest::Approx(1e-3).epsilon(1e-9));
  ok = ok && all_negative && mon.first_violation_time.has_value();

  // No false alarms on models that keep positivity.
  bool clean = true;
  for (const char* preset : {"pauli_isotropic", "dephasing"}) {
    auto good = rodeo::make_preset(preset);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      TrajectoryConfig cfg;
      cfg.dt = 1e-3;
      cfg.t_max = 0.3;
      cfg.n_traj = 300;
      cfg.seed = seed;
      auto res = rodeo::run_nmqj(good, TransformationStrategy::zero(), psi, cfg);
      clean = clean && !res.breakdown.has_value();
    }
  }
  CHECK(clean);
  CHECK(report(6, ok && clean));
}

// ---------------------------------------------------------------------------
// 7. Both engines agree with each other under the same transformation.

TEST_CASE("direct and ensemble engines agree under the target-basis rule") {
  auto me = rodeo::make_preset("pauli_isotropic");
  CVector psi = rodeo::named_state("plus");
  auto strategy = TransformationStrategy::target_basis(rodeo::named_state("zero"),
                                                       rodeo::named_state("one"));

  TrajectoryConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_max = 1.0;
  cfg.n_traj = 10000;
  cfg.seed = 5150;
  cfg.threads = bench_threads();
  auto a = rodeo::run_jump_ensemble(me, strategy, psi, cfg);

  TrajectoryConfig cfg_b = cfg;
  cfg_b.seed = 5151;
  cfg_b.threads = 1;
  auto b = rodeo::run_nmqj(me, strategy, psi, cfg_b);
  CHECK(!b.breakdown.has_value());
  CHECK(b.reverse_jumps == 0);

  auto rep = rodeo::compare(rodeo::bloch_series(a.ensemble), rodeo::bloch_series(b.ensemble),
                            0.0, 5.0);
  CHECK(rep.pass);
  MESSAGE("engine deviation ", rep.max_dev, " at t=", rep.max_dev_time, " (",
          rep.max_dev_component, "), min margin ", rep.min_margin);
  CHECK(report(7, rep.pass && !b.breakdown.has_value()));
}

// ---------------------------------------------------------------------------
// 8. Deterministic output: the trajectory file is byte-identical no matter
//    how many worker threads produced it.

TEST_CASE("trajectory output is byte-identical across thread counts") {
  std::vector<std::string> files;
  std::vector<DirGuard> dirs;
  dirs.reserve(3);
  for (int threads : {1, 2, 8}) {
    dirs.emplace_back("acceptance_threads_" + std::to_string(threads));
    nlohmann::json j = {
        {"mode", "jump"},
        {"model", {{"preset", "pauli_isotropic"}}},
        {"dt", 1e-3},
        {"t_max", 0.5},
        {"n_traj", 2000},
        {"seed", 77},
        {"threads", threads},
        {"out_dir", dirs.back().path.string()},
    };
    auto cfg = rodeo::parse_config(j);
    auto out = rodeo::run(cfg);
    REQUIRE(out.exit_code == 0);
    files.push_back(slurp(dirs.back().path / "trajectory.csv"));
    REQUIRE(!files.back().empty());
  }
  bool same = files[0] == files[1] && files[0] == files[2];
  CHECK(same);
  CHECK(report(8, same));
}

// ---------------------------------------------------------------------------
// 9. The exact integrator converges at fourth order.

TEST_CASE("exact integrator shows fourth-order convergence") {
  auto me = rodeo::make_preset("dephasing");
  CMatrix rho0 = rodeo::projector(rodeo::named_state("plus"));
  const double want = std::exp(-2.0);

  std::vector<double> errs;
  for (double dt : {1e-2, 5e-3, 2.5e-3}) {
    auto traj = rodeo::evolve_exact(me, rho0, dt, 1.0);
    auto b = rodeo::bloch_series(traj);
    errs.push_back(std::abs(b.x.back() - want));
  }
  REQUIRE(errs.size() == 3);
  CHECK(errs[0] > errs[1]);
  CHECK(errs[1] > errs[2]);
  double p1 = std::log2(errs[0] / errs[1]);
  double p2 = std::log2(errs[1] / errs[2]);
  CHECK(p1 >= 3.9);
  CHECK(p2 >= 3.9);
  MESSAGE("errors ", errs[0], " / ", errs[1], " / ", errs[2], ", observed orders ", p1,
          ", ", p2);
  CHECK(report(9, p1 >= 3.9 && p2 >= 3.9));
}
