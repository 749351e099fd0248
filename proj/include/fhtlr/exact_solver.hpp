#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fhtlr/errors.hpp"

namespace fhtlr {

// Dense dynamics over flat state/action indices. Environments that can
// enumerate their model expose one of these; the learners never see it.
struct ExplicitDynamics {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> transition;    // [(s * A + a) * S + s'] = P(s' | s, a)
  std::vector<double> reward;        // [s * A + a] = expected immediate reward
  std::vector<double> initial_dist;  // [s], distribution of the start state

  double p(int s, int a, int s_next) const {
    return transition[(static_cast<std::size_t>(s) * num_actions + a) * num_states + s_next];
  }
  double r(int s, int a) const {
    return reward[static_cast<std::size_t>(s) * num_actions + a];
  }

  void validate() const {
    if (num_states < 1 || num_actions < 1) {
      throw ValidationError("dynamics need at least one state and one action");
    }
    const auto S = static_cast<std::size_t>(num_states);
    const auto A = static_cast<std::size_t>(num_actions);
    if (transition.size() != S * A * S || reward.size() != S * A) {
      throw ValidationError("dynamics arrays have inconsistent sizes");
    }
    for (std::size_t row = 0; row < S * A; ++row) {
      double sum = 0.0;
      for (std::size_t sn = 0; sn < S; ++sn) {
        const double v = transition[row * S + sn];
        if (!(v >= 0.0)) {
          throw ValidationError("negative transition probability in row " + std::to_string(row));
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw ValidationError("transition row " + std::to_string(row) +
                              " sums to " + std::to_string(sum) + ", not 1");
      }
    }
    validate_distribution(initial_dist, S, "initial distribution");
  }

  static void validate_distribution(const std::vector<double>& dist, std::size_t size,
                                    const std::string& what) {
    if (dist.size() != size) throw ValidationError(what + " has wrong size");
    double sum = 0.0;
    for (double v : dist) {
      if (!(v >= 0.0)) throw ValidationError(what + " has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ValidationError(what + " sums to " + std::to_string(sum) + ", not 1");
    }
  }
};

// Optimal value functions and policy over t = 1..T, plus the expected
// return of the optimal policy from the initial-state distribution.
struct OptimalSolution {
  int horizon = 0;
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> q_star;  // [(t-1) * S * A + s * A + a]
  std::vector<int> pi_star;    // [(t-1) * S + s], argmax action (lowest index on ties)
  double v_start = 0.0;

  double q(int t, int s, int a) const {
    return q_star[(static_cast<std::size_t>(t - 1) * num_states + s) * num_actions + a];
  }
  int policy(int t, int s) const {
    return pi_star[static_cast<std::size_t>(t - 1) * num_states + s];
  }
};

// Backward induction: the terminal layer equals the reward function, and each
// earlier layer adds the transition-weighted maximum of the next layer.
inline OptimalSolution backward_induction(const ExplicitDynamics& dyn, int horizon) {
  dyn.validate();
  if (horizon < 1) throw ValidationError("horizon must be >= 1");
  const auto S = static_cast<std::size_t>(dyn.num_states);
  const auto A = static_cast<std::size_t>(dyn.num_actions);

  OptimalSolution sol;
  sol.horizon = horizon;
  sol.num_states = dyn.num_states;
  sol.num_actions = dyn.num_actions;
  sol.q_star.assign(static_cast<std::size_t>(horizon) * S * A, 0.0);
  sol.pi_star.assign(static_cast<std::size_t>(horizon) * S, 0);

  std::vector<double> v_next(S, 0.0);  // max_a Q_{t+1}(s, a); zero beyond T
  for (int t = horizon; t >= 1; --t) {
    const std::size_t layer = static_cast<std::size_t>(t - 1) * S * A;
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        double q = dyn.reward[s * A + a];
        if (t < horizon) {
          const std::size_t row = (s * A + a) * S;
          double exp_next = 0.0;
          for (std::size_t sn = 0; sn < S; ++sn) {
            exp_next += dyn.transition[row + sn] * v_next[sn];
          }
          q += exp_next;
        }
        sol.q_star[layer + s * A + a] = q;
      }
    }
    for (std::size_t s = 0; s < S; ++s) {
      int best = 0;
      double best_q = sol.q_star[layer + s * A];
      for (std::size_t a = 1; a < A; ++a) {
        const double q = sol.q_star[layer + s * A + a];
        if (q > best_q) {
          best_q = q;
          best = static_cast<int>(a);
        }
      }
      sol.pi_star[static_cast<std::size_t>(t - 1) * S + s] = best;
      v_next[s] = best_q;
    }
  }
  // v_next now holds max_a Q_1(s, a)
  double v0 = 0.0;
  for (std::size_t s = 0; s < S; ++s) v0 += dyn.initial_dist[s] * v_next[s];
  sol.v_start = v0;
  return sol;
}

// Exact expected return of a fixed non-stationary policy (T x S action table,
// flattened as policy[(t-1) * S + s]), evaluated by the same recursion with
// fixed actions. No sampling.
inline double policy_value(const ExplicitDynamics& dyn, const std::vector<int>& policy,
                           const std::vector<double>& init_dist) {
  dyn.validate();
  const auto S = static_cast<std::size_t>(dyn.num_states);
  const auto A = static_cast<std::size_t>(dyn.num_actions);
  if (policy.empty() || policy.size() % S != 0) {
    throw ValidationError("policy table size is not a multiple of the state count");
  }
  ExplicitDynamics::validate_distribution(init_dist, S, "initial distribution");
  const int horizon = static_cast<int>(policy.size() / S);

  std::vector<double> v(S, 0.0);
  std::vector<double> v_prev(S, 0.0);
  for (int t = horizon; t >= 1; --t) {
    std::swap(v, v_prev);
    for (std::size_t s = 0; s < S; ++s) {
      const int a = policy[static_cast<std::size_t>(t - 1) * S + s];
      if (a < 0 || static_cast<std::size_t>(a) >= A) {
        throw ValidationError("policy action out of range at t=" + std::to_string(t) +
                              ", s=" + std::to_string(s));
      }
      double q = dyn.reward[s * A + a];
      if (t < horizon) {
        const std::size_t row = (s * A + a) * S;
        double exp_next = 0.0;
        for (std::size_t sn = 0; sn < S; ++sn) exp_next += dyn.transition[row + sn] * v_prev[sn];
        q += exp_next;
      }
      v[s] = q;
    }
  }
  double value = 0.0;
  for (std::size_t s = 0; s < S; ++s) value += init_dist[s] * v[s];
  return value;
}

}  // namespace fhtlr
