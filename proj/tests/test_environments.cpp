#include <catch2/catch_amalgamated.hpp>

#include "fhtlr/envs/grid_world.hpp"
#include "fhtlr/envs/wireless.hpp"
#include "fhtlr/exact_solver.hpp"
#include "fhtlr/mdp.hpp"
#include "fhtlr/tabular_agents.hpp"

using namespace fhtlr;

TEST_CASE("grid world geometry, clamping and absorbing goals") {
  const GridWorld env{GridWorldConfig{}};
  Rng rng(1);

  // at goal B any action stays with reward 0
  for (int a = 0; a < 4; ++a) {
    const auto res = env.step({4, 4}, {a}, 2, rng);
    CHECK(res.next_state == MultiIndex{4, 4});
    CHECK(res.reward == 0.0);
  }
  // adjacent to B, moving into it pays 100
  const auto into_b = env.step({4, 3}, {GridWorld::kRight}, 1, rng);
  CHECK(into_b.next_state == MultiIndex{4, 4});
  CHECK(into_b.reward == 100.0);
  // edge moves clamp
  const auto clamped = env.step({0, 2}, {GridWorld::kUp}, 1, rng);
  CHECK(clamped.next_state == MultiIndex{0, 2});
  CHECK(clamped.reward == 0.0);
  // entering A pays 50
  const auto into_a = env.step({0, 1}, {GridWorld::kLeft}, 1, rng);
  CHECK(into_a.next_state == MultiIndex{0, 0});
  CHECK(into_a.reward == 50.0);
}

TEST_CASE("grid world episode returns stay in the reachable set") {
  const GridWorld env{GridWorldConfig{}};
  class RandomishAgent : public Agent {
   public:
    MultiIndex greedy_action(int t, const MultiIndex& s) const override {
      return {(t + s[0] + s[1]) % 4};
    }
    void observe(const Transition&) override {}
    std::size_t parameter_count() const override { return 0; }
  } agent;

  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto res = run_episode(env, agent, 0.5, seed);
    REQUIRE(res.transitions.size() == 5);
    const double r = res.episodic_return;
    REQUIRE((r == 0.0 || r == 50.0 || r == 100.0 || r == 150.0));
  }
}

TEST_CASE("explicit dynamics agree with the simulator everywhere") {
  const GridWorld env{GridWorldConfig{}};
  const ExplicitDynamics dyn = env.explicit_dynamics();
  dyn.validate();
  Rng rng(7);
  const auto& space = env.space();
  for (int i = 0; i < 100'000; ++i) {
    const auto s = next_below(rng, space.num_states());
    const auto a = next_below(rng, space.num_actions());
    const auto res = env.step(space.state_from_flat(s), space.action_from_flat(a),
                              1 + static_cast<int>(next_below(rng, 5)), rng);
    const auto next = space.flatten_state(res.next_state);
    REQUIRE(dyn.p(static_cast<int>(s), static_cast<int>(a), static_cast<int>(next)) == 1.0);
    REQUIRE(dyn.r(static_cast<int>(s), static_cast<int>(a)) == res.reward);
  }
  // rewards sit only on moves entering a goal
  for (std::size_t s = 0; s < space.num_states(); ++s) {
    for (std::size_t a = 0; a < space.num_actions(); ++a) {
      const double r = dyn.r(static_cast<int>(s), static_cast<int>(a));
      if (r != 0.0) {
        std::size_t next = 0;
        for (std::size_t sn = 0; sn < space.num_states(); ++sn) {
          if (dyn.p(static_cast<int>(s), static_cast<int>(a), static_cast<int>(sn)) == 1.0) next = sn;
        }
        const auto cell = space.state_from_flat(next);
        const bool is_goal = (cell == MultiIndex{0, 0}) || (cell == MultiIndex{4, 4});
        REQUIRE(is_goal);
        REQUIRE(next != s);
      }
    }
  }
}

TEST_CASE("grid world oracle matches the narrative and the reported scale") {
  const GridWorld env{GridWorldConfig{}};
  const auto sol = backward_induction(env.explicit_dynamics(), 5);

  // expected optimal return from a uniform non-goal start: 89.13, matching
  // the reported 89.10 within +-3
  CHECK(std::abs(sol.v_start - 89.10) <= 3.0);
  CHECK(sol.v_start == Catch::Approx(2050.0 / 23.0).epsilon(1e-12));

  // some start cells must head for the low-reward corner: from (0,1) the big
  // goal is out of reach (distance 7 > 5 steps), so the optimal value from
  // there is exactly the small reward
  const auto& space = env.space();
  const int s01 = static_cast<int>(space.flatten_state({0, 1}));
  CHECK(sol.q(1, s01, sol.policy(1, s01)) == 50.0);
  // and at the last step moving toward A is the strict argmax there
  CHECK(sol.policy(5, s01) == GridWorld::kLeft);
  CHECK(sol.q(5, s01, GridWorld::kLeft) == 50.0);
  CHECK(sol.q(5, s01, GridWorld::kRight) == 0.0);
}

TEST_CASE("grid world config validation") {
  GridWorldConfig bad;
  bad.goals = {{0, 0, 50.0}, {0, 0, 100.0}};
  CHECK_THROWS_AS(GridWorld{bad}, ValidationError);
  GridWorldConfig off;
  off.goals = {{9, 9, 1.0}};
  CHECK_THROWS_AS(GridWorld{off}, ValidationError);
}

TEST_CASE("wireless state layout and terminal reward") {
  WirelessConfig cfg;
  const WirelessEnv env{cfg};
  const auto& space = env.space();
  // D_S = 2C + 2 state dims, D_A = C action dims
  CHECK(space.state_dims() == std::vector<int>{2, 2, 2, 2, 4, 6});
  CHECK(space.action_dims() == std::vector<int>{3, 3});
  CHECK(space.num_states() == 384);
  CHECK(space.num_actions() == 9);
  CHECK(space.num_cells() == 17'280);

  // terminal weighted sum with w = (+1, -2), battery 3, queue 1 -> 1
  WirelessConfig det = cfg;
  det.harvest_prob = 0.0;
  det.arrival_prob = 0.0;
  const WirelessEnv denv{det};
  Rng rng(3);
  const MultiIndex state = {0, 0, 0, 0, 3, 1};
  const auto res = denv.step(state, {0, 0}, 5, rng);
  CHECK(res.reward == 3.0 * 1.0 + 1.0 * (-2.0));
  // idle action: queue unchanged, battery unchanged (no harvest)
  CHECK(res.next_state[4] == 3);
  CHECK(res.next_state[5] == 1);
}

TEST_CASE("wireless Shannon rate delivers floor(log2(1 + g p / noise)) packets") {
  WirelessConfig cfg;
  cfg.channels = 1;
  cfg.fading_gains = {3.0};
  cfg.power_values = {0.0, 1.0};
  cfg.energy_costs = {0, 1};
  cfg.occupancy_stay_free = 1.0;  // never turns busy
  cfg.arrival_prob = 0.0;
  cfg.harvest_prob = 0.0;
  cfg.initial_queue = 5;
  const WirelessEnv env{cfg};
  Rng rng(5);
  // state: fading 0 (gain 3), free, battery 3, queue 5; power 1 => rate
  // log2(1 + 3) = 2, so two packets leave the queue
  const auto res = env.step({0, 0, 3, 5}, {1}, 1, rng);
  CHECK(res.next_state[3] == 3);
  CHECK(res.next_state[2] == 2);  // battery paid one unit
  CHECK(res.reward == 0.0);       // t < T
}

TEST_CASE("wireless infeasible actions truncate to affordable levels") {
  WirelessConfig cfg;
  cfg.arrival_prob = 0.0;
  cfg.harvest_prob = 0.0;
  const WirelessEnv env{cfg};
  Rng rng(9);
  // battery 1: requesting (2, 2) costing 2+2 truncates to (1, 0): channel
  // order, highest affordable level each
  const MultiIndex state = {1, 1, 0, 0, 1, 5};
  const auto res = env.step(state, {2, 2}, 1, rng);
  CHECK(res.next_state[4] == 0);  // exactly one unit spent
  // gain 4, power 1: floor(log2(5)) = 2 packets from channel 0 only
  CHECK(res.next_state[5] == 3);
}

TEST_CASE("wireless episodes run exactly T steps with reward only at the end") {
  const WirelessEnv env{WirelessConfig{}};
  FhqAgent zero(env.space(), {StepSizeSchedule::Kind::kConstant, 0.0});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto res = run_episode(env, zero, 0.7, seed);
    REQUIRE(res.transitions.size() == 5);
    for (const auto& tr : res.transitions) {
      if (!tr.terminal) REQUIRE(tr.reward == 0.0);
    }
    REQUIRE(res.episodic_return == res.transitions.back().reward);
  }
}

TEST_CASE("wireless ranges hold under random stepping") {
  const WirelessConfig cfg;
  const WirelessEnv env{cfg};
  const auto& space = env.space();
  Rng rng(11);
  MultiIndex state = env.sample_initial_state(rng);
  for (int i = 0; i < 100'000; ++i) {
    const int t = 1 + static_cast<int>(next_below(rng, 5));
    const auto a = space.action_from_flat(next_below(rng, space.num_actions()));
    const auto res = env.step(state, a, t, rng);
    for (std::size_t d = 0; d < res.next_state.size(); ++d) {
      REQUIRE(res.next_state[d] >= 0);
      REQUIRE(res.next_state[d] < space.state_dims()[d]);
    }
    if (t < 5) REQUIRE(res.reward == 0.0);
    state = res.next_state;
  }
}

TEST_CASE("wireless occupancy and fading marginals approach stationarity") {
  const WirelessConfig cfg;
  const WirelessEnv env{cfg};
  Rng rng(13);
  MultiIndex state = env.sample_initial_state(rng);
  const long n = 200'000;
  long busy0 = 0, fade_high0 = 0;
  for (long i = 0; i < n; ++i) {
    const auto res = env.step(state, {0, 0}, 1 + static_cast<int>(i % 5), rng);
    state = res.next_state;
    busy0 += state[2];
    fade_high0 += state[0];
  }
  // two-state chain: asymptotic variance of the mean is p(1-p)(1+rho)/(1-rho)
  const double p_busy = env.busy_stationary();
  const double rho_occ = cfg.occupancy_stay_free + cfg.occupancy_stay_busy - 1.0;
  const double sd_occ =
      std::sqrt(p_busy * (1 - p_busy) * (1 + rho_occ) / (1 - rho_occ) / n);
  CHECK(std::abs(busy0 / static_cast<double>(n) - p_busy) <= 3 * sd_occ);

  const double rho_fade = 2.0 * cfg.fading_stay_prob - 1.0;
  const double sd_fade = std::sqrt(0.25 * (1 + rho_fade) / (1 - rho_fade) / n);
  CHECK(std::abs(fade_high0 / static_cast<double>(n) - 0.5) <= 3 * sd_fade);
}

TEST_CASE("wireless config validation") {
  WirelessConfig bad;
  bad.weight_queue = 0.5;
  CHECK_THROWS_AS(WirelessEnv{bad}, ValidationError);
  WirelessConfig bad2;
  bad2.power_values = {1.0, 2.0};
  bad2.energy_costs = {1, 2};
  CHECK_THROWS_AS(WirelessEnv{bad2}, ValidationError);  // no idle level
  WirelessConfig bad3;
  bad3.initial_queue = 17;
  CHECK_THROWS_AS(WirelessEnv{bad3}, ValidationError);
}
