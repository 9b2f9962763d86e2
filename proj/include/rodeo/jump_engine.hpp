#pragma once
// Engine A: independent piecewise-deterministic quantum-jump trajectories.
// First-order stepping; jumps land on exact eigenvectors of the rate
// operator. Requires non-negative rates and hands control to the ensemble
// engine (NegativeRate) when that fails.

#include <cstdint>
#include <optional>
#include <vector>

#include "rodeo/complex_linalg.hpp"
#include "rodeo/ensemble_stats.hpp"
#include "rodeo/master_equation.hpp"
#include "rodeo/rate_operator.hpp"

namespace rodeo {

struct TrajectoryConfig {
  double dt = 1e-3;
  double t_max = 1.0;
  long n_traj = 1000;
  std::uint64_t seed = 0;
  double max_event_prob = 0.1;  // guard on sum(lambda) * dt per step
  int threads = 1;
};

struct JumpLogEntry {
  double time;            // grid time at which the jump fired
  long from_state_index;  // grid index of the pre-jump state
  int eigenindex;
  double rate;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<CVector> states;
  std::vector<JumpLogEntry> jump_log;
};

struct JumpEnsembleResult {
  EnsembleResult ensemble;
  long total_jumps = 0;
};

// Normalized first-order step psi -> (1 - i K_psi dt) psi / ||...||.
CVector deterministic_step(const MasterEquation& me, double t, const CVector& psi,
                           const TransformationStrategy& strategy, double dt);

// Same step given a precomputed Phi; out may not alias psi.
void deterministic_step_with_phi(const MasterEquation& me, double t, const CVector& psi,
                                 const CVector& phi, double dt, CVector& out);

// At most one event per step, chosen by a single cumulative comparison of
// u against the non-self eigenvalue probabilities lambda_i * dt. Throws
// NegativeRate / StepTooLarge; `t` is error context.
std::optional<int> sample_event(const RateOperator& rate_op, double dt, double u,
                                double max_event_prob, double t);

// One trajectory, one RNG substream derived from (cfg.seed, stream_id).
TrajectoryRecord run_trajectory(const MasterEquation& me,
                                const TransformationStrategy& strategy,
                                const CVector& psi0, const TrajectoryConfig& cfg,
                                std::uint64_t stream_id);

// Mean of projectors with per-entry standard errors. Requires >= 2 records
// on identical grids.
EnsembleResult ensemble_average(const std::vector<TrajectoryRecord>& records);

// Full ensemble run, parallelized over fixed-size trajectory chunks. The
// chunk layout and the merge order are independent of cfg.threads, so the
// result is bit-identical for any thread count.
JumpEnsembleResult run_jump_ensemble(const MasterEquation& me,
                                     const TransformationStrategy& strategy,
                                     const CVector& psi0, const TrajectoryConfig& cfg);

}  // namespace rodeo
