#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fhtlr/errors.hpp"
#include "fhtlr/mdp.hpp"

namespace fhtlr {

struct GridGoal {
  int row = 0;
  int col = 0;
  double reward = 0.0;
};

struct GridWorldConfig {
  int height = 5;
  int width = 5;
  int horizon = 5;
  std::vector<GridGoal> goals = {{0, 0, 50.0}, {4, 4, 100.0}};

  void validate() const {
    if (height < 1 || width < 1) throw ValidationError("grid extents must be >= 1");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    for (std::size_t i = 0; i < goals.size(); ++i) {
      const GridGoal& g = goals[i];
      if (g.row < 0 || g.row >= height || g.col < 0 || g.col >= width) {
        throw ValidationError("goal " + std::to_string(i) + " outside the grid");
      }
      if (!std::isfinite(g.reward)) throw ValidationError("goal reward must be finite");
      for (std::size_t j = 0; j < i; ++j) {
        if (goals[j].row == g.row && goals[j].col == g.col) {
          throw ValidationError("goals must sit on distinct cells");
        }
      }
    }
    if (static_cast<int>(goals.size()) >= height * width) {
      throw ValidationError("at least one non-goal cell is required as a start state");
    }
  }
};

// Deterministic grid: state is (row, col), actions are up/down/left/right,
// moves off the edge stay put. Entering a goal cell pays its reward once;
// goal cells are absorbing afterwards (any action stays, reward 0), so an
// episode collects at most one goal but always runs the full T steps. The
// start state is uniform over the non-goal cells.
class GridWorld final : public FiniteHorizonMdp {
 public:
  enum Action { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

  explicit GridWorld(GridWorldConfig cfg)
      : cfg_(std::move(cfg)),
        space_({cfg_.height, cfg_.width}, {4}, cfg_.horizon) {
    cfg_.validate();
    goal_reward_.assign(static_cast<std::size_t>(cfg_.height) * cfg_.width, 0.0);
    is_goal_.assign(goal_reward_.size(), false);
    for (const GridGoal& g : cfg_.goals) {
      const std::size_t cell = static_cast<std::size_t>(g.row) * cfg_.width + g.col;
      goal_reward_[cell] = g.reward;
      is_goal_[cell] = true;
    }
    for (std::size_t cell = 0; cell < is_goal_.size(); ++cell) {
      if (!is_goal_[cell]) start_cells_.push_back(cell);
    }
  }

  const StateActionSpace& space() const override { return space_; }
  const GridWorldConfig& config() const { return cfg_; }

  MultiIndex sample_initial_state(Rng& rng) const override {
    const std::size_t cell = start_cells_[next_below(rng, start_cells_.size())];
    return {static_cast<int>(cell) / cfg_.width, static_cast<int>(cell) % cfg_.width};
  }

  StepResult step(const MultiIndex& state, const MultiIndex& action, int t,
                  Rng& /*rng*/) const override {
    space_.time_axis(t);  // range check
    const std::size_t from = space_.flatten_state(state);
    const std::size_t a = space_.flatten_action(action);
    const auto [next, reward] = move(from, a);
    return {space_.state_from_flat(next), reward};
  }

  bool has_explicit_dynamics() const override { return true; }

  ExplicitDynamics explicit_dynamics() const override {
    const auto S = space_.num_states();
    const auto A = space_.num_actions();
    ExplicitDynamics dyn;
    dyn.num_states = static_cast<int>(S);
    dyn.num_actions = static_cast<int>(A);
    dyn.transition.assign(S * A * S, 0.0);
    dyn.reward.assign(S * A, 0.0);
    dyn.initial_dist.assign(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t a = 0; a < A; ++a) {
        const auto [next, reward] = move(s, a);
        dyn.transition[(s * A + a) * S + next] = 1.0;
        dyn.reward[s * A + a] = reward;
      }
    }
    for (std::size_t cell : start_cells_) {
      dyn.initial_dist[cell] = 1.0 / static_cast<double>(start_cells_.size());
    }
    return dyn;
  }

 private:
  // Shared by the simulator and the exported dynamics so they cannot drift.
  std::pair<std::size_t, double> move(std::size_t from, std::size_t action) const {
    if (is_goal_[from]) return {from, 0.0};
    int row = static_cast<int>(from) / cfg_.width;
    int col = static_cast<int>(from) % cfg_.width;
    switch (action) {
      case kUp: row -= 1; break;
      case kDown: row += 1; break;
      case kLeft: col -= 1; break;
      case kRight: col += 1; break;
      default: throw IndexError("grid action out of range");
    }
    if (row < 0 || row >= cfg_.height || col < 0 || col >= cfg_.width) {
      return {from, 0.0};  // bumping the edge stays put
    }
    const std::size_t next = static_cast<std::size_t>(row) * cfg_.width + col;
    return {next, goal_reward_[next]};
  }

  GridWorldConfig cfg_;
  StateActionSpace space_;
  std::vector<double> goal_reward_;
  std::vector<bool> is_goal_;
  std::vector<std::size_t> start_cells_;
};

}  // namespace fhtlr
