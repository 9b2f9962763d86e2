#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rodeo/complex_linalg.hpp"
#include "rodeo/ensemble_stats.hpp"
#include "rodeo/errors.hpp"
#include "rodeo/jump_engine.hpp"
#include "rodeo/master_equation.hpp"
#include "rodeo/rate_operator.hpp"

namespace rodeo {

// Engine B: a synchronized ensemble of state classes. Members of one class
// share a representative vector; jumps move counts between classes. Negative
// rates are realized as reverse jumps that move members from the target class
// back to the source class, which requires the target class to be populated.
// When it is not, the run has witnessed a positivity breakdown and stops.

struct EnsembleClass {
  int id = 0;
  CVector representative;
  long count = 0;
  int empty_steps = 0;  // consecutive steps spent empty; purged past the limit
};

struct BreakdownEvent {
  double time = 0.0;
  int source_class = 0;   // class whose rate operator went negative
  int eigenindex = 0;
  double rate = 0.0;      // the offending eigenvalue
  CVector missing_target; // eigenvector with no populated class to draw from
};

class BreakdownError : public Error {
 public:
  explicit BreakdownError(BreakdownEvent event);
  const BreakdownEvent& event() const { return event_; }

 private:
  BreakdownEvent event_;
};

struct EnsembleState {
  std::vector<EnsembleClass> classes;  // ascending id; may hold empty entries
  int next_id = 0;
  long n_members = 0;
  long step_index = 0;
  long direct_jumps = 0;
  long reverse_jumps = 0;
  // id and representative of every class ever created, in creation order
  std::vector<std::pair<int, CVector>> registry;

  // Adds a class for `rep` (normalized + phase-canonicalized) with `count`
  // members and records it in the registry.
  int add_class(const CVector& rep, long count);
  long populated_count() const;
};

// Initial ensemble: every member in one class at psi0.
EnsembleState make_ensemble(const MasterEquation& me, const CVector& psi0, long n_members);

// Advances the ensemble from t to t + dt. Throws BreakdownError when a
// negative rate has no populated class to pull members from, StepTooLarge
// when per-member event probabilities exceed max_event_prob.
void step_ensemble(const MasterEquation& me, const TransformationStrategy& strategy,
                   EnsembleState& state, double t, double dt, std::uint64_t seed,
                   double max_event_prob);

struct NmqjResult {
  EnsembleResult ensemble;  // truncated at the last recorded point on breakdown
  // Per grid point: populated classes as (id, count), ascending id.
  std::vector<std::vector<std::pair<int, long>>> populations;
  std::vector<int> n_classes;           // populated classes per grid point
  std::vector<long> reverse_jumps_cum;  // cumulative reverse jumps per grid point
  long direct_jumps = 0;
  long reverse_jumps = 0;
  std::optional<BreakdownEvent> breakdown;
  std::vector<std::pair<int, CVector>> class_registry;
  std::vector<EnsembleClass> final_classes;  // populated classes at the end
};

NmqjResult run_nmqj(const MasterEquation& me, const TransformationStrategy& strategy,
                    const CVector& psi0, const TrajectoryConfig& cfg);

}  // namespace rodeo
