#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "fhtlr/errors.hpp"
#include "fhtlr/indexing.hpp"
#include "fhtlr/mdp.hpp"
#include "fhtlr/parafac.hpp"
#include "fhtlr/tabular_agents.hpp"

namespace fhtlr {

// Whether the per-mode row updates within one transition read a common
// snapshot (jacobi) or the freshest factors (gauss-seidel). The update rule
// carries the previous iterate on every factor, so jacobi is the default.
enum class UpdateMode { kJacobi, kGaussSeidel };

struct FhtlrOptions {
  int rank = 1;
  StepSizeSchedule alpha{StepSizeSchedule::Kind::kConstant, 0.005};
  UpdateMode update_mode = UpdateMode::kJacobi;
  double init_scale = 0.1;
  // Abort-with-diagnostics bound on |model entry|; multilinear SGD can blow
  // up with a large step size and that must be visible, not saturated.
  double divergence_bound = 1e6;
};

struct TargetEstimate {
  double q_hat = 0.0;
  bool bootstrap = false;  // false iff the transition was terminal
};

// Online stochastic block-coordinate learner over the rank-K PARAFAC model of
// the state-action-time value tensor. Per transition it computes one target
// estimate and then moves one row of every factor along the multilinear
// gradient direction.
class FhtlrAgent : public Agent {
 public:
  FhtlrAgent(StateActionSpace space, const FhtlrOptions& opts, std::uint64_t init_seed)
      : space_(std::move(space)),
        opts_(opts),
        model_(ParafacModel::random(space_.tensor_dims(), opts.rank, opts.init_scale,
                                    init_seed)) {
    if (opts.rank < 1) throw ValidationError("rank must be >= 1");
    if (!(opts.init_scale >= 0.0)) throw ValidationError("init_scale must be >= 0");
    if (!(opts.divergence_bound > 0.0)) throw ValidationError("divergence_bound must be > 0");
  }

  // Target from the current model, before any factor update for this
  // transition: the raw reward at t = T, otherwise reward plus the maximum
  // model entry over the joint action space at (next state, t + 1).
  TargetEstimate compute_target(const Transition& tr) const {
    detail::check_transition(space_, tr);
    if (tr.terminal) return {tr.reward, false};
    double best = -std::numeric_limits<double>::infinity();
    MultiIndex idx = space_.joint_index(tr.next_state, space_.action_from_flat(0), tr.t + 1);
    const std::size_t action_offset = space_.state_dims().size();
    for (std::size_t a = 0; a < space_.num_actions(); ++a) {
      const MultiIndex action = space_.action_from_flat(a);
      for (std::size_t d = 0; d < action.size(); ++d) idx[action_offset + d] = action[d];
      const double v = model_.eval_entry(idx);
      if (v > best) best = v;
    }
    return {tr.reward + best, true};
  }

  void observe(const Transition& tr) override {
    ++transitions_seen_;
    const TargetEstimate target = compute_target(tr);
    if (!std::isfinite(target.q_hat)) {
      throw DivergenceError("non-finite target at transition " +
                            std::to_string(transitions_seen_));
    }
    const MultiIndex joint = space_.joint_index(tr.state, tr.action, tr.t);
    const double alpha = opts_.alpha.kind == StepSizeSchedule::Kind::kConstant
                             ? opts_.alpha.alpha0
                             : opts_.alpha.alpha(visit_count(joint));

    const int order = model_.order();
    const int K = model_.rank();
    if (opts_.update_mode == UpdateMode::kJacobi) {
      // Snapshot the touched rows; the error term and all cross-mode
      // products read the same pre-update iterate for every mode.
      std::vector<std::vector<double>> rows(order);
      for (int d = 0; d < order; ++d) {
        const double* r = model_.factor(d).row(joint[d]);
        rows[d].assign(r, r + K);
      }
      double entry = 0.0;
      for (int k = 0; k < K; ++k) {
        double prod = 1.0;
        for (int d = 0; d < order; ++d) prod *= rows[d][k];
        entry += prod;
      }
      const double err = target.q_hat - entry;
      for (int d = 0; d < order; ++d) {
        double* out = model_.factor(d).row(joint[d]);
        for (int k = 0; k < K; ++k) {
          double others = 1.0;
          for (int j = 0; j < order; ++j) {
            if (j != d) others *= rows[j][k];
          }
          out[k] = rows[d][k] + alpha * err * others;
        }
      }
    } else {
      // Gauss-Seidel: each mode recomputes the error and products from the
      // freshest factors. The target stays the pre-update one.
      std::vector<double> direction(K);
      for (int d = 0; d < order; ++d) {
        const double entry = model_.eval_entry(joint);
        const double err = target.q_hat - entry;
        for (int k = 0; k < K; ++k) {
          double others = 1.0;
          for (int j = 0; j < order; ++j) {
            if (j != d) others *= model_.factor(j).at(joint[j], k);
          }
          direction[k] = others;
        }
        double* out = model_.factor(d).row(joint[d]);
        for (int k = 0; k < K; ++k) out[k] += alpha * err * direction[k];
      }
    }

    for (int d = 0; d < order; ++d) {
      const double* r = model_.factor(d).row(joint[d]);
      for (int k = 0; k < K; ++k) {
        if (!std::isfinite(r[k])) {
          throw DivergenceError("non-finite factor entry (mode " + std::to_string(d) +
                                ") at transition " + std::to_string(transitions_seen_));
        }
      }
    }
    const double entry_after = model_.eval_entry(joint);
    if (!std::isfinite(entry_after) || std::abs(entry_after) > opts_.divergence_bound) {
      throw DivergenceError("model entry " + std::to_string(entry_after) +
                            " exceeded divergence bound at transition " +
                            std::to_string(transitions_seen_));
    }
  }

  // Argmax of the model over the joint action space at (state, t); ties break
  // to the lowest flat action index. Evaluates the action fiber entry by
  // entry, never a dense reconstruction.
  MultiIndex greedy_action(int t, const MultiIndex& state) const override {
    MultiIndex idx = space_.joint_index(state, space_.action_from_flat(0), t);
    const std::size_t action_offset = space_.state_dims().size();
    std::size_t best_a = 0;
    double best_v = model_.eval_entry(idx);
    for (std::size_t a = 1; a < space_.num_actions(); ++a) {
      const MultiIndex action = space_.action_from_flat(a);
      for (std::size_t d = 0; d < action.size(); ++d) idx[action_offset + d] = action[d];
      const double v = model_.eval_entry(idx);
      if (v > best_v) {
        best_v = v;
        best_a = a;
      }
    }
    return space_.action_from_flat(best_a);
  }

  std::size_t parameter_count() const override { return model_.parameter_count(); }

  const ParafacModel& model() const { return model_; }
  ParafacModel& mutable_model() { return model_; }
  const StateActionSpace& space() const { return space_; }
  std::uint64_t transitions_seen() const { return transitions_seen_; }

 private:
  std::uint64_t visit_count(const MultiIndex& joint) {
    const std::size_t flat = flatten(model_.dims(), joint);
    return visits_[flat]++;
  }

  StateActionSpace space_;
  FhtlrOptions opts_;
  ParafacModel model_;
  std::unordered_map<std::size_t, std::uint64_t> visits_;
  std::uint64_t transitions_seen_ = 0;
};

}  // namespace fhtlr
