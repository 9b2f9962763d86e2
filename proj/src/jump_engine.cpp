#include "rodeo/jump_engine.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "rodeo/errors.hpp"
#include "rodeo/numeric_policy.hpp"
#include "rodeo/rng.hpp"

namespace rodeo {

namespace {

constexpr long kChunk = 64;  // trajectories per accumulation chunk

long grid_steps(const TrajectoryConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_max > 0.0))
    throw StepTooLarge("trajectory grid: dt and t_max must be positive", 0.0);
  long n = std::lround(cfg.t_max / cfg.dt);
  return n < 1 ? 1 : n;
}

void check_initial_state(const MasterEquation& me, const CVector& psi0) {
  if (static_cast<int>(psi0.size()) != me.dim())
    throw DimensionMismatch("initial state dimension mismatch");
  if (std::abs(vec_norm(psi0) - 1.0) > 1e-9)
    throw Error("initial state must be unit length");
}

}  // namespace

void deterministic_step_with_phi(const MasterEquation& me, double t, const CVector& psi,
                                 const CVector& phi, double dt, CVector& out) {
  out = psi;
  for (const auto& term : me.hamiltonian()) {
    double c = term.coeff(t);
    if (c != 0.0) matvec_axpy(term.matrix, psi, cplx(0.0, -dt * c), out);
  }
  for (const auto& ch : me.channels()) {
    double g = ch.rate(t);
    if (g != 0.0) matvec_axpy(ch.op_dag_op, psi, cplx(-0.5 * dt * g, 0.0), out);
  }
  cplx s = cplx(-0.5 * dt, 0.0) * inner(psi, psi);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * phi[i];
  normalize(out);
}

CVector deterministic_step(const MasterEquation& me, double t, const CVector& psi,
                           const TransformationStrategy& strategy, double dt) {
  RateOpContext ctx;
  build_rate_context(me, t, psi, strategy, ctx);
  CVector out;
  deterministic_step_with_phi(me, t, psi, ctx.phi, dt, out);
  return out;
}

namespace {

// Core of sample_event, operating on the flat context.
std::optional<int> sample_event_ctx(const RateOpContext& ctx, double dt, double u,
                                    double max_event_prob, double t) {
  const double neg_tol = numeric_policy().neg_rate_tol;
  double total = 0.0;
  const std::size_t n = ctx.evals.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (ctx.self_jump[i]) continue;
    double l = ctx.evals[i];
    if (l < -neg_tol)
      throw NegativeRate("negative jump rate " + std::to_string(l) + " (eigenindex " +
                             std::to_string(i) + ") at t = " + std::to_string(t) +
                             "; this model needs the ensemble engine",
                         t, static_cast<int>(i), l);
    if (l > 0.0) total += l * dt;
  }
  if (total > max_event_prob)
    throw StepTooLarge("sum of event probabilities " + std::to_string(total) +
                           " exceeds " + std::to_string(max_event_prob) + " at t = " +
                           std::to_string(t) + "; reduce dt",
                       t);
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ctx.self_jump[i]) continue;
    double l = ctx.evals[i];
    if (l <= 0.0) continue;
    cum += l * dt;
    if (u < cum) return static_cast<int>(i);
  }
  return std::nullopt;
}

// One trajectory; reports each grid state through `sink(k, psi)`.
template <typename Sink>
long run_trajectory_core(const MasterEquation& me, const TransformationStrategy& strategy,
                         const CVector& psi0, const TrajectoryConfig& cfg,
                         std::uint64_t stream_id, RateOpContext& ctx,
                         std::vector<JumpLogEntry>* log, Sink&& sink) {
  const long n_steps = grid_steps(cfg);
  const int d = me.dim();
  RngStream rng(cfg.seed, stream_id);

  CVector psi = psi0;
  CVector next;
  long jumps = 0;
  sink(0, psi);
  for (long k = 0; k < n_steps; ++k) {
    double t = static_cast<double>(k) * cfg.dt;
    build_rate_context(me, t, psi, strategy, ctx);
    double u = rng.next_double();
    std::optional<int> evt = sample_event_ctx(ctx, cfg.dt, u, cfg.max_event_prob, t);
    if (evt) {
      int i = *evt;
      psi.resize(static_cast<std::size_t>(d));
      for (int r = 0; r < d; ++r) psi[static_cast<std::size_t>(r)] = ctx.evecs(r, i);
      ++jumps;
      if (log) log->push_back({t, k, i, ctx.evals[static_cast<std::size_t>(i)]});
    } else {
      deterministic_step_with_phi(me, t, psi, ctx.phi, cfg.dt, next);
      psi.swap(next);
    }
    sink(static_cast<std::size_t>(k) + 1, psi);
  }
  return jumps;
}

}  // namespace

std::optional<int> sample_event(const RateOperator& rate_op, double dt, double u,
                                double max_event_prob, double t) {
  // Re-pack into a context view; cheap relative to a step.
  RateOpContext ctx;
  ctx.evals = rate_op.spectral.eigenvalues;
  ctx.self_jump = rate_op.self_jump;
  const int d = static_cast<int>(rate_op.spectral.eigenvectors.size());
  ctx.evecs.resize(d);
  return sample_event_ctx(ctx, dt, u, max_event_prob, t);
}

TrajectoryRecord run_trajectory(const MasterEquation& me,
                                const TransformationStrategy& strategy,
                                const CVector& psi0, const TrajectoryConfig& cfg,
                                std::uint64_t stream_id) {
  check_initial_state(me, psi0);
  const long n_steps = grid_steps(cfg);
  TrajectoryRecord rec;
  rec.times.reserve(static_cast<std::size_t>(n_steps) + 1);
  for (long k = 0; k <= n_steps; ++k) rec.times.push_back(static_cast<double>(k) * cfg.dt);
  rec.states.assign(static_cast<std::size_t>(n_steps) + 1, CVector());

  RateOpContext ctx;
  run_trajectory_core(me, strategy, psi0, cfg, stream_id, ctx, &rec.jump_log,
                      [&](std::size_t k, const CVector& psi) { rec.states[k] = psi; });
  return rec;
}

EnsembleResult ensemble_average(const std::vector<TrajectoryRecord>& records) {
  if (records.size() < 2)
    throw Error("ensemble_average: at least two records required");
  const std::vector<double>& times = records.front().times;
  const int d = static_cast<int>(records.front().states.front().size());
  EnsembleStats stats;
  stats.init(d, times.size());
  for (const auto& rec : records) {
    if (rec.times.size() != times.size())
      throw GridMismatch("ensemble_average: records on different grids");
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (rec.times[k] != times[k])
        throw GridMismatch("ensemble_average: records on different grids");
      stats.add_state(k, rec.states[k]);
    }
  }
  return stats.finalize(times, times.size());
}

JumpEnsembleResult run_jump_ensemble(const MasterEquation& me,
                                     const TransformationStrategy& strategy,
                                     const CVector& psi0, const TrajectoryConfig& cfg) {
  check_initial_state(me, psi0);
  if (cfg.n_traj < 2) throw Error("run_jump_ensemble: n_traj must be >= 2");
  const long n_steps = grid_steps(cfg);
  const std::size_t n_grid = static_cast<std::size_t>(n_steps) + 1;
  std::vector<double> times(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) times[k] = static_cast<double>(k) * cfg.dt;

  const long n_chunks = (cfg.n_traj + kChunk - 1) / kChunk;
  std::vector<EnsembleStats> partial(static_cast<std::size_t>(n_chunks));
  std::vector<long> jumps(static_cast<std::size_t>(n_chunks), 0);
  std::vector<std::exception_ptr> failed(static_cast<std::size_t>(n_chunks));

  std::atomic<long> next_chunk{0};
  auto worker = [&]() {
    RateOpContext ctx;
    for (;;) {
      long c = next_chunk.fetch_add(1);
      if (c >= n_chunks) return;
      auto& stats = partial[static_cast<std::size_t>(c)];
      stats.init(me.dim(), n_grid);
      long lo = c * kChunk;
      long hi = std::min(cfg.n_traj, lo + kChunk);
      try {
        for (long j = lo; j < hi; ++j) {
          long local_jumps = run_trajectory_core(
              me, strategy, psi0, cfg, static_cast<std::uint64_t>(j), ctx, nullptr,
              [&](std::size_t k, const CVector& psi) { stats.add_state(k, psi); });
          jumps[static_cast<std::size_t>(c)] += local_jumps;
        }
      } catch (...) {
        failed[static_cast<std::size_t>(c)] = std::current_exception();
      }
    }
  };

  int n_threads = cfg.threads < 1 ? 1 : cfg.threads;
  if (static_cast<long>(n_threads) > n_chunks) n_threads = static_cast<int>(n_chunks);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Prefer the failure with the earliest violating time; deterministic
  // regardless of which worker hit it.
  int best = -1;
  double best_time = 0.0;
  for (long c = 0; c < n_chunks; ++c) {
    if (!failed[static_cast<std::size_t>(c)]) continue;
    double tc = -1.0;
    try {
      std::rethrow_exception(failed[static_cast<std::size_t>(c)]);
    } catch (const NegativeRate& e) {
      tc = e.time();
    } catch (const StepTooLarge& e) {
      tc = e.time();
    } catch (...) {
      tc = 0.0;
    }
    if (best < 0 || tc < best_time) {
      best = static_cast<int>(c);
      best_time = tc;
    }
  }
  if (best >= 0) std::rethrow_exception(failed[static_cast<std::size_t>(best)]);

  JumpEnsembleResult result;
  EnsembleStats total = std::move(partial.front());
  for (long c = 1; c < n_chunks; ++c) total.merge(partial[static_cast<std::size_t>(c)]);
  for (long c = 0; c < n_chunks; ++c) result.total_jumps += jumps[static_cast<std::size_t>(c)];
  result.ensemble = total.finalize(times, n_grid);
  return result;
}

}  // namespace rodeo
