#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fhtlr/errors.hpp"
#include "fhtlr/indexing.hpp"
#include "fhtlr/mdp.hpp"

namespace fhtlr {

// Step-size rule shared by the tabular and tensor learners. The
// inverse-visit-count rule alpha0 / (1 + visits) is square-summable but not
// summable along each cell's visit sequence.
struct StepSizeSchedule {
  enum class Kind { kConstant, kInverseVisit };
  Kind kind = Kind::kConstant;
  double alpha0 = 0.1;

  StepSizeSchedule() = default;
  StepSizeSchedule(Kind k, double a0) : kind(k), alpha0(a0) {
    if (!(alpha0 >= 0.0)) throw ValidationError("alpha0 must be >= 0");
  }

  // visits = number of prior updates of the cell being updated
  double alpha(std::uint64_t visits) const {
    return kind == Kind::kConstant ? alpha0 : alpha0 / (1.0 + static_cast<double>(visits));
  }
};

namespace detail {
inline void check_transition(const StateActionSpace& space, const Transition& tr) {
  if (tr.t < 1 || tr.t > space.horizon()) {
    throw IndexError("transition time " + std::to_string(tr.t) + " out of range");
  }
  if (tr.terminal != (tr.t == space.horizon())) {
    throw ValidationError("terminal flag inconsistent with t == T");
  }
}

inline std::size_t argmax_flat(const double* values, std::size_t count) {
  std::size_t best = 0;
  double best_v = values[0];
  for (std::size_t i = 1; i < count; ++i) {
    if (values[i] > best_v) {  // ties break to the lowest flat index
      best_v = values[i];
      best = i;
    }
  }
  return best;
}
}  // namespace detail

// Finite-horizon Q-learning: one dense table per time-step, single-entry
// stochastic updates. The update target bootstraps from the next time layer
// except at t = T, where it is the raw reward.
class FhqAgent : public Agent {
 public:
  FhqAgent(StateActionSpace space, StepSizeSchedule alpha)
      : space_(std::move(space)),
        alpha_(alpha),
        values_(space_.num_cells(), 0.0),
        visits_(space_.num_cells(), 0) {}

  MultiIndex greedy_action(int t, const MultiIndex& state) const override {
    const std::size_t base = cell(t, space_.flatten_state(state), 0);
    return space_.action_from_flat(detail::argmax_flat(&values_[base], space_.num_actions()));
  }

  void observe(const Transition& tr) override {
    detail::check_transition(space_, tr);
    const std::size_t idx =
        cell(tr.t, space_.flatten_state(tr.state), space_.flatten_action(tr.action));
    double target = tr.reward;
    if (!tr.terminal) {
      const std::size_t next_base = cell(tr.t + 1, space_.flatten_state(tr.next_state), 0);
      target += max_over_actions(next_base);
    }
    const double a = alpha_.alpha(visits_[idx]);
    ++visits_[idx];
    values_[idx] += a * (target - values_[idx]);
  }

  std::size_t parameter_count() const override { return values_.size(); }

  double value(int t, std::size_t flat_state, std::size_t flat_action) const {
    return values_[cell(t, flat_state, flat_action)];
  }
  double& value(int t, std::size_t flat_state, std::size_t flat_action) {
    return values_[cell(t, flat_state, flat_action)];
  }
  const std::vector<double>& table() const { return values_; }
  const StateActionSpace& space() const { return space_; }

 private:
  std::size_t cell(int t, std::size_t flat_state, std::size_t flat_action) const {
    return (static_cast<std::size_t>(space_.time_axis(t)) * space_.num_states() + flat_state) *
               space_.num_actions() +
           flat_action;
  }
  double max_over_actions(std::size_t base) const {
    double best = values_[base];
    for (std::size_t a = 1; a < space_.num_actions(); ++a) {
      best = values_[base + a] > best ? values_[base + a] : best;
    }
    return best;
  }

  StateActionSpace space_;
  StepSizeSchedule alpha_;
  std::vector<double> values_;
  std::vector<std::uint32_t> visits_;
};

// Stationary (non-FH) Q-learning baseline: a single shared table for all
// time-steps, undiscounted, with episode end acting as target truncation
// (no bootstrap beyond T).
class StationaryQAgent : public Agent {
 public:
  StationaryQAgent(StateActionSpace space, StepSizeSchedule alpha)
      : space_(std::move(space)),
        alpha_(alpha),
        values_(space_.num_states() * space_.num_actions(), 0.0),
        visits_(space_.num_states() * space_.num_actions(), 0) {}

  MultiIndex greedy_action(int /*t*/, const MultiIndex& state) const override {
    const std::size_t base = space_.flatten_state(state) * space_.num_actions();
    return space_.action_from_flat(detail::argmax_flat(&values_[base], space_.num_actions()));
  }

  void observe(const Transition& tr) override {
    detail::check_transition(space_, tr);
    const std::size_t idx =
        space_.flatten_state(tr.state) * space_.num_actions() + space_.flatten_action(tr.action);
    double target = tr.reward;
    if (!tr.terminal) {
      const std::size_t base = space_.flatten_state(tr.next_state) * space_.num_actions();
      double best = values_[base];
      for (std::size_t a = 1; a < space_.num_actions(); ++a) {
        best = values_[base + a] > best ? values_[base + a] : best;
      }
      target += best;
    }
    const double a = alpha_.alpha(visits_[idx]);
    ++visits_[idx];
    values_[idx] += a * (target - values_[idx]);
  }

  std::size_t parameter_count() const override { return values_.size(); }

  double value(std::size_t flat_state, std::size_t flat_action) const {
    return values_[flat_state * space_.num_actions() + flat_action];
  }
  double& value(std::size_t flat_state, std::size_t flat_action) {
    return values_[flat_state * space_.num_actions() + flat_action];
  }
  const std::vector<double>& table() const { return values_; }
  const StateActionSpace& space() const { return space_; }

 private:
  StateActionSpace space_;
  StepSizeSchedule alpha_;
  std::vector<double> values_;
  std::vector<std::uint32_t> visits_;
};

}  // namespace fhtlr
