#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "fhtlr/errors.hpp"
#include "fhtlr/exact_solver.hpp"
#include "fhtlr/indexing.hpp"
#include "fhtlr/rng.hpp"

namespace fhtlr {

// One sampled interaction. Time runs 1..T; terminal iff t == T.
// Learners must ignore next_state on terminal transitions.
struct Transition {
  int t = 1;
  MultiIndex state;
  MultiIndex action;
  MultiIndex next_state;
  double reward = 0.0;
  bool terminal = false;
};

// Linear per-episode decay from eps_start to eps_end over decay_episodes,
// flat afterwards. Episode indices are 1-based.
struct EpsilonSchedule {
  double eps_start = 1.0;
  double eps_end = 0.05;
  int decay_episodes = 1;

  EpsilonSchedule() = default;
  EpsilonSchedule(double start, double end, int decay)
      : eps_start(start), eps_end(end), decay_episodes(decay) {
    if (!(eps_start >= 0.0 && eps_start <= 1.0) || !(eps_end >= 0.0 && eps_end <= 1.0)) {
      throw ValidationError("epsilon bounds must be probabilities");
    }
    if (eps_end > eps_start) {
      throw ValidationError("eps_end must not exceed eps_start (schedule is non-increasing)");
    }
    if (decay_episodes < 1) throw ValidationError("decay_episodes must be >= 1");
  }

  double at(long episode) const {
    if (episode < 1) episode = 1;
    const double frac = std::min(1.0, static_cast<double>(episode - 1) / decay_episodes);
    return eps_start + (eps_end - eps_start) * frac;
  }
};

// Environment contract. Environments are stateless: the episode state is
// threaded through step() by the caller, so instances can be shared by
// independent runs with their own rngs.
class FiniteHorizonMdp {
 public:
  struct StepResult {
    MultiIndex next_state;
    double reward = 0.0;
  };

  virtual ~FiniteHorizonMdp() = default;

  virtual const StateActionSpace& space() const = 0;
  virtual MultiIndex sample_initial_state(Rng& rng) const = 0;
  virtual StepResult step(const MultiIndex& state, const MultiIndex& action, int t,
                          Rng& rng) const = 0;

  // Environments with an enumerable model opt in; the exact solver needs this.
  virtual bool has_explicit_dynamics() const { return false; }
  virtual ExplicitDynamics explicit_dynamics() const {
    throw ValidationError("oracle unavailable for this environment");
  }
};

// Value-based learner contract: greedy action selection plus an online
// update per observed transition.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual MultiIndex greedy_action(int t, const MultiIndex& state) const = 0;
  virtual void observe(const Transition& tr) = 0;
  virtual std::size_t parameter_count() const = 0;
};

struct EpisodeResult {
  std::vector<Transition> transitions;  // exactly T of them
  double episodic_return = 0.0;         // sum of the T rewards
};

// Runs one episode of exactly T steps under the epsilon-greedy sampling
// policy: with probability epsilon the action is uniform over the joint
// action space, otherwise the agent's greedy choice. When learn is true the
// agent observes each transition as it is generated (fully online).
// Deterministic given (rng_seed, agent state, env): environment randomness
// and exploration randomness use separate substreams of rng_seed.
inline EpisodeResult run_episode(const FiniteHorizonMdp& env, Agent& agent, double epsilon,
                                 std::uint64_t rng_seed, bool learn = false) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must be in [0, 1]");
  const StateActionSpace& space = env.space();
  Rng env_rng(stream_seed(rng_seed, Stream::kEpisodeEnv));
  Rng explore_rng(stream_seed(rng_seed, Stream::kEpisodeExplore));

  EpisodeResult result;
  result.transitions.reserve(space.horizon());
  MultiIndex state = env.sample_initial_state(env_rng);
  for (int t = 1; t <= space.horizon(); ++t) {
    MultiIndex action;
    if (next_bernoulli(explore_rng, epsilon)) {
      action = space.action_from_flat(next_below(explore_rng, space.num_actions()));
    } else {
      action = agent.greedy_action(t, state);
      if (action.size() != space.action_dims().size()) {
        throw ValidationError("agent returned an action with wrong dimensionality");
      }
      for (std::size_t d = 0; d < action.size(); ++d) {
        if (action[d] < 0 || action[d] >= space.action_dims()[d]) {
          throw ValidationError("agent returned out-of-range action (dimension " +
                                std::to_string(d) + ")");
        }
      }
    }
    auto [next_state, reward] = env.step(state, action, t, env_rng);
    Transition tr{t, state, action, std::move(next_state), reward, t == space.horizon()};
    result.episodic_return += reward;
    if (learn) agent.observe(tr);
    state = tr.next_state;
    result.transitions.push_back(std::move(tr));
  }
  return result;
}

}  // namespace fhtlr
