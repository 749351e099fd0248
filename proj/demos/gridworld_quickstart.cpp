// Minimal library walkthrough: solve the grid world exactly, train the
// finite-horizon tabular learner and the tensor low-rank learner against it,
// and print how close their greedy returns get to the oracle.

#include <cstdio>

#include "fhtlr/envs/grid_world.hpp"
#include "fhtlr/exact_solver.hpp"
#include "fhtlr/fhtlr_agent.hpp"
#include "fhtlr/tabular_agents.hpp"

using namespace fhtlr;

int main() {
  GridWorld env{GridWorldConfig{}};

  const auto oracle = backward_induction(env.explicit_dynamics(), env.space().horizon());
  std::printf("oracle v_start: %.4f\n", oracle.v_start);

  FhqAgent fhq(env.space(), {StepSizeSchedule::Kind::kInverseVisit, 1.0});
  FhtlrOptions opts;
  opts.rank = 8;
  opts.alpha = {StepSizeSchedule::Kind::kConstant, 1e-4};
  opts.init_scale = 1.5;
  FhtlrAgent fhtlr(env.space(), opts, /*init_seed=*/7);

  const EpsilonSchedule eps{1.0, 0.05, 30000};
  for (long episode = 1; episode <= 60000; ++episode) {
    run_episode(env, fhq, eps.at(episode), stream_seed(1, Stream::kTrain, episode), true);
    run_episode(env, fhtlr, eps.at(episode), stream_seed(2, Stream::kTrain, episode), true);
  }

  auto mean_greedy = [&](Agent& agent, std::uint64_t seed) {
    double sum = 0.0;
    for (int j = 1; j <= 2000; ++j) {
      sum += run_episode(env, agent, 0.0, stream_seed(seed, Stream::kEval, 0, j)).episodic_return;
    }
    return sum / 2000.0;
  };
  std::printf("fhq greedy return:   %.4f  (%zu params)\n", mean_greedy(fhq, 3),
              fhq.parameter_count());
  std::printf("fhtlr greedy return: %.4f  (%zu params)\n", mean_greedy(fhtlr, 4),
              fhtlr.parameter_count());
  return 0;
}
