#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "fhtlr/errors.hpp"

namespace fhtlr {

// Per-dimension 0-based coordinates into a multi-dimensional discrete space.
using MultiIndex = std::vector<int>;

// Product of cardinalities, overflow-checked.
inline std::size_t joint_cardinality(const std::vector<int>& dims) {
  std::size_t n = 1;
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (dims[d] < 1) {
      throw ValidationError("dimension " + std::to_string(d) +
                            " has cardinality " + std::to_string(dims[d]) +
                            " (must be >= 1)");
    }
    const auto card = static_cast<std::size_t>(dims[d]);
    if (n > kMax / card) throw ValidationError("joint cardinality overflows size_t");
    n *= card;
  }
  return n;
}

// Mixed-radix flat index; the FIRST dimension varies slowest.
// Bijective with unflatten() on the index range of `dims`.
inline std::size_t flatten(const std::vector<int>& dims, const MultiIndex& idx) {
  if (idx.size() != dims.size()) {
    throw IndexError("index has " + std::to_string(idx.size()) +
                     " coordinates, space has " + std::to_string(dims.size()));
  }
  std::size_t flat = 0;
  for (std::size_t d = 0; d < dims.size(); ++d) {
    if (idx[d] < 0 || idx[d] >= dims[d]) {
      throw IndexError("coordinate " + std::to_string(idx[d]) +
                       " out of range [0, " + std::to_string(dims[d]) +
                       ") for dimension " + std::to_string(d));
    }
    flat = flat * static_cast<std::size_t>(dims[d]) + static_cast<std::size_t>(idx[d]);
  }
  return flat;
}

inline MultiIndex unflatten(const std::vector<int>& dims, std::size_t flat) {
  MultiIndex idx(dims.size());
  for (std::size_t d = dims.size(); d-- > 0;) {
    const auto card = static_cast<std::size_t>(dims[d]);
    idx[d] = static_cast<int>(flat % card);
    flat /= card;
  }
  if (flat != 0) throw IndexError("flat index out of range for space");
  return idx;
}

// The joint state-action-time space. States and actions are multi-dimensional;
// the associated Q tensor has dimensions (state dims..., action dims..., T)
// with time last. Time is 1..T everywhere in the public API; the only place
// it becomes a 0-based axis coordinate is time_axis() below.
class StateActionSpace {
 public:
  StateActionSpace(std::vector<int> state_dims, std::vector<int> action_dims,
                   int horizon)
      : state_dims_(std::move(state_dims)),
        action_dims_(std::move(action_dims)),
        horizon_(horizon) {
    if (state_dims_.empty() || action_dims_.empty()) {
      throw ValidationError("state and action spaces need at least one dimension");
    }
    if (horizon_ < 1) throw ValidationError("horizon must be >= 1");
    num_states_ = joint_cardinality(state_dims_);
    num_actions_ = joint_cardinality(action_dims_);
    constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
    if (num_states_ > kMax / num_actions_) {
      throw ValidationError("joint state-action cardinality overflows size_t");
    }
    const std::size_t joint = num_states_ * num_actions_;
    if (joint > kMax / static_cast<std::size_t>(horizon_)) {
      throw ValidationError("state-action-time cardinality overflows size_t");
    }
  }

  const std::vector<int>& state_dims() const { return state_dims_; }
  const std::vector<int>& action_dims() const { return action_dims_; }
  int horizon() const { return horizon_; }

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  std::size_t num_cells() const { return num_states_ * num_actions_ * horizon_; }

  // D + 1 dimensions: states, actions, then time.
  std::vector<int> tensor_dims() const {
    std::vector<int> dims = state_dims_;
    dims.insert(dims.end(), action_dims_.begin(), action_dims_.end());
    dims.push_back(horizon_);
    return dims;
  }

  int time_axis(int t) const {
    if (t < 1 || t > horizon_) {
      throw IndexError("time " + std::to_string(t) + " out of range [1, " +
                       std::to_string(horizon_) + "]");
    }
    return t - 1;
  }

  // Composite [s; a; t] coordinate of the Q tensor.
  MultiIndex joint_index(const MultiIndex& state, const MultiIndex& action,
                         int t) const {
    MultiIndex idx;
    idx.reserve(state_dims_.size() + action_dims_.size() + 1);
    idx.insert(idx.end(), state.begin(), state.end());
    idx.insert(idx.end(), action.begin(), action.end());
    idx.push_back(time_axis(t));
    return idx;
  }

  std::size_t flatten_state(const MultiIndex& s) const { return flatten(state_dims_, s); }
  std::size_t flatten_action(const MultiIndex& a) const { return flatten(action_dims_, a); }
  MultiIndex state_from_flat(std::size_t flat) const { return unflatten(state_dims_, flat); }
  MultiIndex action_from_flat(std::size_t flat) const { return unflatten(action_dims_, flat); }

 private:
  std::vector<int> state_dims_;
  std::vector<int> action_dims_;
  int horizon_;
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
};

}  // namespace fhtlr
