#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fhtlr/errors.hpp"
#include "fhtlr/mdp.hpp"

namespace fhtlr {

// Time-limited opportunistic multiple-access model: one user with a battery
// and a packet queue transmits over C orthogonal channels whose fading level
// and occupancy evolve as two-state-per-channel Markov chains. All rewards
// are zero until the terminal step, which pays a weighted sum of the final
// battery level (positive weight) and the remaining queue (negative weight).
struct WirelessConfig {
  int channels = 2;
  int horizon = 5;

  std::vector<double> fading_gains = {1.0, 4.0};  // SNR gain per fading level
  double fading_stay_prob = 0.7;  // else jump uniformly to another level

  double occupancy_stay_free = 0.8;
  double occupancy_stay_busy = 0.6;
  double busy_loss_prob = 0.5;  // each packet lost independently when busy

  int battery_levels = 4;     // energy units 0 .. battery_levels-1
  double harvest_prob = 0.3;  // +1 unit per step
  int queue_levels = 6;       // packets 0 .. queue_levels-1
  double arrival_prob = 0.4;  // +1 packet per step

  std::vector<double> power_values = {0.0, 1.0, 2.0};  // per-channel transmit power
  std::vector<int> energy_costs = {0, 1, 2};           // integer units per power level
  double noise_power = 1.0;

  double weight_battery = 1.0;
  double weight_queue = -2.0;

  int initial_battery = 3;
  int initial_queue = 5;

  void validate() const {
    if (channels < 1) throw ValidationError("need at least one channel");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    if (fading_gains.empty()) throw ValidationError("need at least one fading level");
    for (double g : fading_gains) {
      if (!(g > 0.0)) throw ValidationError("fading gains must be positive");
    }
    for (double p : {fading_stay_prob, occupancy_stay_free, occupancy_stay_busy,
                     busy_loss_prob, harvest_prob, arrival_prob}) {
      if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("chain parameters must be probabilities");
    }
    if (battery_levels < 1 || queue_levels < 1) {
      throw ValidationError("battery and queue need at least one level");
    }
    if (power_values.empty() || power_values.size() != energy_costs.size()) {
      throw ValidationError("power_values and energy_costs must be non-empty and aligned");
    }
    if (power_values[0] != 0.0 || energy_costs[0] != 0) {
      throw ValidationError("power level 0 must be the idle level (zero power, zero cost)");
    }
    for (std::size_t i = 0; i < power_values.size(); ++i) {
      if (!(power_values[i] >= 0.0)) throw ValidationError("powers must be >= 0");
      if (energy_costs[i] < 0) throw ValidationError("energy costs must be >= 0");
      if (i > 0 && (power_values[i] < power_values[i - 1] || energy_costs[i] < energy_costs[i - 1])) {
        throw ValidationError("power levels must be sorted ascending in power and cost");
      }
    }
    if (!(noise_power > 0.0)) throw ValidationError("noise power must be positive");
    if (!(weight_battery > 0.0)) throw ValidationError("battery weight must be positive");
    if (!(weight_queue < 0.0)) throw ValidationError("queue weight must be negative");
    if (initial_battery < 0 || initial_battery >= battery_levels ||
        initial_queue < 0 || initial_queue >= queue_levels) {
      throw ValidationError("initial battery/queue outside their ranges");
    }
  }
};

class WirelessEnv final : public FiniteHorizonMdp {
 public:
  explicit WirelessEnv(WirelessConfig cfg)
      : cfg_(std::move(cfg)), space_(make_space(cfg_)) {}

  const StateActionSpace& space() const override { return space_; }
  const WirelessConfig& config() const { return cfg_; }

  // State layout: [fading_1..fading_C, occupancy_1..occupancy_C, battery, queue].
  MultiIndex sample_initial_state(Rng& rng) const override {
    const int C = cfg_.channels;
    MultiIndex s(2 * C + 2);
    for (int c = 0; c < C; ++c) {
      s[c] = static_cast<int>(next_below(rng, cfg_.fading_gains.size()));
    }
    const double stationary_busy = busy_stationary();
    for (int c = 0; c < C; ++c) {
      s[C + c] = next_bernoulli(rng, stationary_busy) ? 1 : 0;
    }
    s[2 * C] = cfg_.initial_battery;
    s[2 * C + 1] = cfg_.initial_queue;
    return s;
  }

  StepResult step(const MultiIndex& state, const MultiIndex& action, int t,
                  Rng& rng) const override {
    space_.time_axis(t);
    const int C = cfg_.channels;
    const int battery = state[2 * C];
    const int queue = state[2 * C + 1];

    // Truncate the requested power levels to the battery, channel by channel
    // in order: each channel gets the highest level affordable from what the
    // earlier channels left over.
    int remaining = battery;
    int spent = 0;
    std::vector<int> level(C);
    for (int c = 0; c < C; ++c) {
      int lvl = action[c];
      while (cfg_.energy_costs[lvl] > remaining) --lvl;  // level 0 costs nothing
      level[c] = lvl;
      remaining -= cfg_.energy_costs[lvl];
      spent += cfg_.energy_costs[lvl];
    }

    // Shannon rate, floored to whole packets; busy channels lose each packet
    // independently with busy_loss_prob.
    int delivered = 0;
    for (int c = 0; c < C; ++c) {
      const double gain = cfg_.fading_gains[state[c]];
      const double power = cfg_.power_values[level[c]];
      const double rate = std::log2(1.0 + gain * power / cfg_.noise_power);
      const int attempted = static_cast<int>(std::floor(rate));
      if (state[C + c] == 1) {
        for (int i = 0; i < attempted; ++i) {
          if (!next_bernoulli(rng, cfg_.busy_loss_prob)) ++delivered;
        }
      } else {
        delivered += attempted;
      }
    }

    const int arrivals = next_bernoulli(rng, cfg_.arrival_prob) ? 1 : 0;
    const int harvest = next_bernoulli(rng, cfg_.harvest_prob) ? 1 : 0;

    MultiIndex next(2 * C + 2);
    for (int c = 0; c < C; ++c) {
      const int levels = static_cast<int>(cfg_.fading_gains.size());
      if (levels == 1 || next_bernoulli(rng, cfg_.fading_stay_prob)) {
        next[c] = state[c];
      } else {
        // uniform over the other levels
        int other = static_cast<int>(next_below(rng, levels - 1));
        next[c] = other >= state[c] ? other + 1 : other;
      }
    }
    for (int c = 0; c < C; ++c) {
      const bool busy = state[C + c] == 1;
      const double stay = busy ? cfg_.occupancy_stay_busy : cfg_.occupancy_stay_free;
      const bool stays = next_bernoulli(rng, stay);
      next[C + c] = (busy == stays) ? 1 : 0;
    }
    next[2 * C] = std::min(cfg_.battery_levels - 1, battery - spent + harvest);
    next[2 * C + 1] = std::min(cfg_.queue_levels - 1, std::max(0, queue - delivered) + arrivals);

    double reward = 0.0;
    if (t == cfg_.horizon) {
      reward = cfg_.weight_battery * next[2 * C] + cfg_.weight_queue * next[2 * C + 1];
    }
    return {std::move(next), reward};
  }

  double busy_stationary() const {
    const double leave_free = 1.0 - cfg_.occupancy_stay_free;
    const double leave_busy = 1.0 - cfg_.occupancy_stay_busy;
    if (leave_free + leave_busy == 0.0) return 0.0;  // frozen chain
    return leave_free / (leave_free + leave_busy);
  }

 private:
  static StateActionSpace make_space(const WirelessConfig& cfg) {
    cfg.validate();
    std::vector<int> state_dims;
    for (int c = 0; c < cfg.channels; ++c) {
      state_dims.push_back(static_cast<int>(cfg.fading_gains.size()));
    }
    for (int c = 0; c < cfg.channels; ++c) state_dims.push_back(2);
    state_dims.push_back(cfg.battery_levels);
    state_dims.push_back(cfg.queue_levels);
    std::vector<int> action_dims(cfg.channels,
                                 static_cast<int>(cfg.power_values.size()));
    return {state_dims, action_dims, cfg.horizon};
  }

  WirelessConfig cfg_;
  StateActionSpace space_;
};

}  // namespace fhtlr
