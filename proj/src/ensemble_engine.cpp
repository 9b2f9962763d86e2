#include "rodeo/ensemble_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rodeo/numeric_policy.hpp"
#include "rodeo/rng.hpp"

namespace rodeo {

namespace {

constexpr int kEmptyRetention = 100;  // steps an empty class keeps its id

std::string breakdown_message(const BreakdownEvent& e) {
  return "positivity breakdown at t = " + std::to_string(e.time) + ": rate " +
         std::to_string(e.rate) + " (class " + std::to_string(e.source_class) +
         ", eigenindex " + std::to_string(e.eigenindex) +
         ") has no populated class to draw members from";
}

// Best match to phi at fidelity >= 1 - match_tol, as an index into `classes`,
// or -1. Ties keep the lowest id.
int match_class(const std::vector<EnsembleClass>& classes, const CVector& phi,
                bool populated_only) {
  const double threshold = 1.0 - numeric_policy().match_tol;
  int best = -1;
  double best_f = -1.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (populated_only && classes[i].count == 0) continue;
    double f = fidelity(classes[i].representative, phi);
    if (f >= threshold && f > best_f) {
      best = static_cast<int>(i);
      best_f = f;
    }
  }
  return best;
}

struct PendingEvent {
  double p = 0.0;      // per-member probability for this step
  bool reverse = false;
  int slot = -1;       // rate-context slot: the class this event's rates came from
  int eigenindex = 0;  // direct only: which eigenvector to land on
  int dest = -1;       // reverse only: class index members return to
  long n_moved = 0;
};

}  // namespace

BreakdownError::BreakdownError(BreakdownEvent event)
    : Error(breakdown_message(event)), event_(std::move(event)) {}

int EnsembleState::add_class(const CVector& rep, long count) {
  EnsembleClass c;
  c.id = next_id++;
  c.representative = rep;
  normalize(c.representative);
  canonicalize_phase(c.representative);
  c.count = count;
  registry.emplace_back(c.id, c.representative);
  classes.push_back(std::move(c));
  return classes.back().id;
}

long EnsembleState::populated_count() const {
  long n = 0;
  for (const auto& c : classes)
    if (c.count > 0) ++n;
  return n;
}

EnsembleState make_ensemble(const MasterEquation& me, const CVector& psi0,
                            long n_members) {
  if (static_cast<int>(psi0.size()) != me.dim())
    throw DimensionMismatch("initial state dimension mismatch");
  if (std::abs(vec_norm(psi0) - 1.0) > 1e-9)
    throw Error("initial state must be unit length");
  if (n_members < 2) throw Error("ensemble needs at least two members");
  EnsembleState st;
  st.n_members = n_members;
  st.add_class(psi0, n_members);
  return st;
}

void step_ensemble(const MasterEquation& me, const TransformationStrategy& strategy,
                   EnsembleState& state, double t, double dt, std::uint64_t seed,
                   double max_event_prob) {
  const int d = me.dim();
  const double breakdown_tol = numeric_policy().breakdown_rate_tol;
  auto& classes = state.classes;
  const std::size_t n_before = classes.size();

  // Slot s <-> s-th populated class, ascending id.
  std::vector<int> slot_class;
  for (std::size_t i = 0; i < n_before; ++i)
    if (classes[i].count > 0) slot_class.push_back(static_cast<int>(i));
  const std::size_t n_slots = slot_class.size();

  std::vector<RateOpContext> ctx(n_slots);
  for (std::size_t s = 0; s < n_slots; ++s)
    build_rate_context(me, t, classes[static_cast<std::size_t>(slot_class[s])].representative,
                       strategy, ctx[s]);

  // Events whose members leave class index x, in sampling order: first this
  // class's own direct jumps (ascending eigenindex), then reverse jumps
  // ordered by (source class, eigenindex).
  std::vector<std::vector<PendingEvent>> events(n_before);
  for (std::size_t s = 0; s < n_slots; ++s) {
    int x = slot_class[s];
    for (int i = 0; i < d; ++i) {
      if (ctx[s].self_jump[static_cast<std::size_t>(i)]) continue;
      double lp = ctx[s].lambda_plus[static_cast<std::size_t>(i)];
      if (lp <= 0.0) continue;
      PendingEvent e;
      e.p = lp * dt;
      e.slot = static_cast<int>(s);
      e.eigenindex = i;
      events[static_cast<std::size_t>(x)].push_back(e);
    }
  }
  CVector vec(static_cast<std::size_t>(d));
  for (std::size_t s = 0; s < n_slots; ++s) {
    int src = slot_class[s];
    for (int i = 0; i < d; ++i) {
      if (ctx[s].self_jump[static_cast<std::size_t>(i)]) continue;
      double lm = ctx[s].lambda_minus[static_cast<std::size_t>(i)];
      if (lm <= breakdown_tol) continue;
      for (int r = 0; r < d; ++r) vec[static_cast<std::size_t>(r)] = ctx[s].evecs(r, i);
      int target = match_class(classes, vec, /*populated_only=*/true);
      if (target < 0) {
        BreakdownEvent ev;
        ev.time = t;
        ev.source_class = classes[static_cast<std::size_t>(src)].id;
        ev.eigenindex = i;
        ev.rate = ctx[s].evals[static_cast<std::size_t>(i)];
        ev.missing_target = vec;
        throw BreakdownError(std::move(ev));
      }
      PendingEvent e;
      e.p = (static_cast<double>(classes[static_cast<std::size_t>(src)].count) /
             static_cast<double>(classes[static_cast<std::size_t>(target)].count)) *
            lm * dt;
      e.reverse = true;
      e.slot = static_cast<int>(s);
      e.eigenindex = i;
      e.dest = src;
      events[static_cast<std::size_t>(target)].push_back(e);
    }
  }

  for (std::size_t x = 0; x < n_before; ++x) {
    double total = 0.0;
    for (const auto& e : events[x]) total += e.p;
    if (total > max_event_prob)
      throw StepTooLarge("per-member event probability " + std::to_string(total) +
                             " in class " + std::to_string(classes[x].id) +
                             " exceeds " + std::to_string(max_event_prob) +
                             " at t = " + std::to_string(t) + "; reduce dt",
                         t);
  }

  // Sample how many members take each event. Sequential conditional binomials
  // reproduce the multinomial law; each (step, class) pair gets its own
  // stream so the draw sequence is independent of everything else.
  for (std::size_t x = 0; x < n_before; ++x) {
    if (events[x].empty()) continue;
    RngStream rng(seed, static_cast<std::uint64_t>(state.step_index),
                  static_cast<std::uint64_t>(classes[x].id));
    long remaining = classes[x].count;
    double rem_p = 1.0;
    for (auto& e : events[x]) {
      if (remaining == 0) break;
      double q = e.p / rem_p;
      if (q > 1.0) q = 1.0;
      e.n_moved = binomial_draw(rng, remaining, q);
      remaining -= e.n_moved;
      rem_p -= e.p;
    }
  }

  // Apply the moves. Direct jumps land on the exact eigenvector; an existing
  // class within match_tol absorbs the members, otherwise a class is created.
  for (std::size_t x = 0; x < n_before; ++x) {
    for (const auto& e : events[x]) {
      if (e.n_moved == 0) continue;
      classes[x].count -= e.n_moved;
      if (e.reverse) {
        classes[static_cast<std::size_t>(e.dest)].count += e.n_moved;
        state.reverse_jumps += e.n_moved;
        continue;
      }
      for (int r = 0; r < d; ++r)
        vec[static_cast<std::size_t>(r)] =
            ctx[static_cast<std::size_t>(e.slot)].evecs(r, e.eigenindex);
      int m = match_class(classes, vec, /*populated_only=*/false);
      if (m >= 0) {
        auto& dest = classes[static_cast<std::size_t>(m)];
        if (dest.count == 0) {
          // Nobody held the old representative; adopt the fresh vector.
          dest.representative = vec;
          canonicalize_phase(dest.representative);
        }
        dest.count += e.n_moved;
      } else {
        state.add_class(vec, e.n_moved);
      }
      state.direct_jumps += e.n_moved;
    }
  }

  // Drift the classes that entered this step populated and still hold
  // members. Classes born this step stay on their eigenvector.
  CVector drifted;
  for (std::size_t s = 0; s < n_slots; ++s) {
    auto& c = classes[static_cast<std::size_t>(slot_class[s])];
    if (c.count == 0) continue;
    deterministic_step_with_phi(me, t, c.representative, ctx[s].phi, dt, drifted);
    canonicalize_phase(drifted);
    c.representative = drifted;
  }

  // Classes that drifted onto each other merge into the lower id.
  for (std::size_t a = 0; a < classes.size(); ++a) {
    if (classes[a].count == 0) continue;
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      if (classes[b].count == 0) continue;
      if (fidelity(classes[a].representative, classes[b].representative) >=
          1.0 - numeric_policy().match_tol) {
        classes[a].count += classes[b].count;
        classes[b].count = 0;
      }
    }
  }

  for (auto& c : classes) {
    if (c.count > 0)
      c.empty_steps = 0;
    else
      ++c.empty_steps;
  }
  classes.erase(std::remove_if(classes.begin(), classes.end(),
                               [](const EnsembleClass& c) {
                                 return c.count == 0 && c.empty_steps > kEmptyRetention;
                               }),
                classes.end());

  ++state.step_index;
}

NmqjResult run_nmqj(const MasterEquation& me, const TransformationStrategy& strategy,
                    const CVector& psi0, const TrajectoryConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_max > 0.0))
    throw StepTooLarge("ensemble grid: dt and t_max must be positive", 0.0);
  long n_steps = std::lround(cfg.t_max / cfg.dt);
  if (n_steps < 1) n_steps = 1;
  const std::size_t n_grid = static_cast<std::size_t>(n_steps) + 1;

  EnsembleState st = make_ensemble(me, psi0, cfg.n_traj);
  EnsembleStats stats;
  stats.init(me.dim(), n_grid);

  NmqjResult res;
  res.populations.reserve(n_grid);
  res.n_classes.reserve(n_grid);
  res.reverse_jumps_cum.reserve(n_grid);

  std::vector<double> times(n_grid);
  for (std::size_t k = 0; k < n_grid; ++k) times[k] = static_cast<double>(k) * cfg.dt;

  std::size_t recorded = 0;
  for (long k = 0; k <= n_steps; ++k) {
    std::vector<std::pair<int, long>> pop;
    for (const auto& c : st.classes) {
      if (c.count == 0) continue;
      pop.emplace_back(c.id, c.count);
      stats.add_state(static_cast<std::size_t>(k), c.representative,
                      static_cast<double>(c.count));
    }
    res.n_classes.push_back(static_cast<int>(pop.size()));
    res.populations.push_back(std::move(pop));
    res.reverse_jumps_cum.push_back(st.reverse_jumps);
    recorded = static_cast<std::size_t>(k) + 1;
    if (k == n_steps) break;
    try {
      step_ensemble(me, strategy, st, times[static_cast<std::size_t>(k)], cfg.dt,
                    cfg.seed, cfg.max_event_prob);
    } catch (const BreakdownError& e) {
      res.breakdown = e.event();
      break;
    }
  }

  res.ensemble = stats.finalize(times, recorded);
  res.direct_jumps = st.direct_jumps;
  res.reverse_jumps = st.reverse_jumps;
  res.class_registry = st.registry;
  for (const auto& c : st.classes)
    if (c.count > 0) res.final_classes.push_back(c);
  return res;
}

}  // namespace rodeo
