#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "expertgame/rng.hpp"
#include "expertgame/types.hpp"

namespace expertgame {

enum class NatureKind { BalancedComb, PureComb, FixedSubset, Custom };

/// How nature picks the subset of experts that gain at each step.
struct NaturePolicy {
  NatureKind kind = NatureKind::BalancedComb;
  ExpertSubset fixed;
  /// Custom: probability of each mask over ranked positions
  /// (bit k = k-th smallest coordinate).
  std::array<double, 16> table{};

  static NaturePolicy balanced_comb() { return {}; }
  static NaturePolicy pure_comb();
  static NaturePolicy fixed_subset(ExpertSubset j);
  static NaturePolicy custom(int n, std::span<const double> by_ranked_mask);

  std::string name() const;
  void validate(int n) const;
};

enum class PlayerKind { GradientU, Uniform, FollowLeader, MultiplicativeWeights };

struct PlayerPolicy {
  PlayerKind kind = PlayerKind::GradientU;
  double eta = 0.0;

  static PlayerPolicy gradient_u() { return {}; }
  static PlayerPolicy uniform() { return {PlayerKind::Uniform, 0.0}; }
  static PlayerPolicy follow_leader() { return {PlayerKind::FollowLeader, 0.0}; }

  std::string name() const;
};

/// Multiplicative weights: alpha_i proportional to exp(eta G^i).
PlayerPolicy mw_player(double eta);

NaturePolicy parse_nature(const std::string& name, int n);
PlayerPolicy parse_player(const std::string& name, double eta);

/// Mixed strategy the player uses at lattice state xi.
Vec4 player_alpha(const PlayerPolicy& p, const RegretState& xi, double delta);

struct SimConfig {
  double delta = 0.1;
  RegretState x0{0.0, 0.0, 0.0, 0.0};
  std::int64_t n_episodes = 1000;
  std::uint64_t seed = 1;
  NaturePolicy nature;
  PlayerPolicy player;
  int threads = 1;

  void validate() const;
};

struct GameStep {
  RegretState x;      // state before the step
  ExpertSubset J;     // experts that gained
  int pick = 0;       // player's expert (0-based)
  int gain = 0;       // player's gain, 0 or 1
};

struct GameTrace {
  std::vector<GameStep> steps;
  RegretState final_state{0.0, 0.0};
  double regret = 0.0;
  std::int64_t stopping_time = 0;
};

struct SimResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  double mean_T = 0.0;
  double std_error_T = 0.0;
  SimConfig config;

  static std::string csv_header();
  std::string csv_row() const;
};

void to_json(nlohmann::json& j, const SimResult& r);

/// T with P(T = t) = delta (1 - delta)^t, t >= 0, by inverse CDF of u in [0,1).
std::int64_t stopping_time(double u, double delta);

/// One game from cfg.x0 until the geometric stopping time.
GameTrace simulate_episode(const SimConfig& cfg, Stream& rng);

/// Mean terminal regret over cfg.n_episodes; episode e uses
/// make_stream(cfg.seed, e) and results are reduced in episode order.
SimResult estimate_regret(const SimConfig& cfg);

}  // namespace expertgame
