#include "expertgame/game_sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "expertgame/closed_form.hpp"

namespace expertgame {

namespace {

constexpr std::uint32_t kCombPositions = (1u << 3) | (1u << 1);

std::string format17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

ExpertSubset ranked_to_experts(std::uint32_t ranked_mask, const RankedState& r) {
  std::uint32_t m = 0;
  for (int k = 0; k < r.n; ++k)
    if ((ranked_mask >> k) & 1u) m |= 1u << r.perm[k];
  return {m, r.n};
}

ExpertSubset draw_subset(const NaturePolicy& p, const RegretState& xi,
                         Stream& rng) {
  const int n = xi.size();
  switch (p.kind) {
    case NatureKind::FixedSubset:
      return p.fixed;
    case NatureKind::PureComb:
      return ranked_to_experts(kCombPositions, rank(xi));
    case NatureKind::BalancedComb: {
      const ExpertSubset j = ranked_to_experts(kCombPositions, rank(xi));
      return uniform01(rng) < 0.5 ? j : j.complement();
    }
    case NatureKind::Custom: {
      const double u = uniform01(rng);
      const int count = 1 << n;
      double acc = 0.0;
      int pick = count - 1;
      for (int m = 0; m < count; ++m) {
        acc += p.table[m];
        if (u < acc) {
          pick = m;
          break;
        }
      }
      return ranked_to_experts(static_cast<std::uint32_t>(pick), rank(xi));
    }
  }
  throw std::logic_error("draw_subset: unknown nature kind");
}

int draw_expert(const Vec4& alpha, int n, Stream& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < n; ++i) {
    if (alpha[i] <= 0.0) continue;
    acc += alpha[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

struct EpisodeOutcome {
  double regret;
  std::int64_t t;
};

EpisodeOutcome run_episode(const SimConfig& cfg, Stream& rng,
                           GameTrace* trace) {
  const std::int64_t T = stopping_time(uniform01(rng), cfg.delta);
  const int n = cfg.x0.size();
  Vec4 xi{};
  std::copy(cfg.x0.begin(), cfg.x0.end(), xi.begin());
  for (std::int64_t t = 0; t < T; ++t) {
    const RegretState state(std::span<const double>(xi.data(), n));
    const ExpertSubset J = draw_subset(cfg.nature, state, rng);
    const Vec4 alpha = player_alpha(cfg.player, state, cfg.delta);
    const int pick = draw_expert(alpha, n, rng);
    const int gain = J.contains(pick) ? 1 : 0;
    if (trace) trace->steps.push_back({state, J, pick, gain});
    for (int i = 0; i < n; ++i)
      xi[i] += (J.contains(i) ? 1.0 : 0.0) - gain;
  }
  const RegretState final_state(std::span<const double>(xi.data(), n));
  const double regret = phi(final_state);
  if (trace) {
    trace->final_state = final_state;
    trace->regret = regret;
    trace->stopping_time = T;
  }
  return {regret, T};
}

}  // namespace

NaturePolicy NaturePolicy::pure_comb() {
  NaturePolicy p;
  p.kind = NatureKind::PureComb;
  return p;
}

NaturePolicy NaturePolicy::fixed_subset(ExpertSubset j) {
  NaturePolicy p;
  p.kind = NatureKind::FixedSubset;
  p.fixed = j;
  return p;
}

NaturePolicy NaturePolicy::custom(int n, std::span<const double> by_ranked_mask) {
  NaturePolicy p;
  p.kind = NatureKind::Custom;
  if (n < 2 || n > kMaxExperts ||
      by_ranked_mask.size() != static_cast<std::size_t>(1 << n))
    throw std::invalid_argument("NaturePolicy::custom: expected 2^N weights");
  std::copy(by_ranked_mask.begin(), by_ranked_mask.end(), p.table.begin());
  p.validate(n);
  return p;
}

std::string NaturePolicy::name() const {
  switch (kind) {
    case NatureKind::BalancedComb: return "balanced_comb";
    case NatureKind::PureComb: return "pure_comb";
    case NatureKind::FixedSubset: return "fixed:" + fixed.to_string();
    case NatureKind::Custom: return "custom";
  }
  return "unknown";
}

void NaturePolicy::validate(int n) const {
  switch (kind) {
    case NatureKind::BalancedComb:
    case NatureKind::PureComb:
      if (n != 4)
        throw std::invalid_argument("comb natures require N = 4");
      return;
    case NatureKind::FixedSubset:
      if (fixed.universe() != n)
        throw std::invalid_argument("fixed subset universe does not match N");
      return;
    case NatureKind::Custom: {
      double sum = 0.0;
      for (int m = 0; m < (1 << n); ++m) {
        if (!(table[m] >= 0.0) || !std::isfinite(table[m]))
          throw std::invalid_argument("custom nature: weights must be >= 0");
        sum += table[m];
      }
      for (int m = 1 << n; m < 16; ++m)
        if (table[m] != 0.0)
          throw std::invalid_argument("custom nature: weight above 2^N");
      if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("custom nature: weights must sum to 1");
      return;
    }
  }
}

std::string PlayerPolicy::name() const {
  switch (kind) {
    case PlayerKind::GradientU: return "gradient_u";
    case PlayerKind::Uniform: return "uniform";
    case PlayerKind::FollowLeader: return "follow_leader";
    case PlayerKind::MultiplicativeWeights: return "mw(" + format17(eta) + ")";
  }
  return "unknown";
}

PlayerPolicy mw_player(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("mw_player: eta must be > 0");
  return {PlayerKind::MultiplicativeWeights, eta};
}

NaturePolicy parse_nature(const std::string& name, int n) {
  NaturePolicy p;
  if (name == "balanced_comb") {
    p = NaturePolicy::balanced_comb();
  } else if (name == "pure_comb") {
    p = NaturePolicy::pure_comb();
  } else if (name.rfind("fixed:", 0) == 0) {
    std::uint32_t mask = 0;
    std::stringstream ss(name.substr(6));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      int label = 0;
      try {
        label = std::stoi(item);
      } catch (const std::exception&) {
        throw std::invalid_argument("fixed nature: bad expert label '" + item + "'");
      }
      if (label < 1 || label > n)
        throw std::invalid_argument("fixed nature: expert label out of range");
      mask |= 1u << (label - 1);
    }
    p = NaturePolicy::fixed_subset(ExpertSubset(mask, n));
  } else {
    throw std::invalid_argument(
        "unknown nature '" + name +
        "'; valid: balanced_comb, pure_comb, fixed:<labels> (e.g. fixed:1,3)");
  }
  p.validate(n);
  return p;
}

PlayerPolicy parse_player(const std::string& name, double eta) {
  if (name == "gradient_u") return PlayerPolicy::gradient_u();
  if (name == "uniform") return PlayerPolicy::uniform();
  if (name == "follow_leader") return PlayerPolicy::follow_leader();
  if (name == "mw") return mw_player(eta);
  throw std::invalid_argument(
      "unknown player '" + name +
      "'; valid: gradient_u, uniform, follow_leader, mw");
}

Vec4 player_alpha(const PlayerPolicy& p, const RegretState& xi, double delta) {
  const int n = xi.size();
  Vec4 a{};
  switch (p.kind) {
    case PlayerKind::GradientU: {
      const double sd = std::sqrt(delta);
      std::array<double, 4> scaled{};
      for (int i = 0; i < n; ++i) scaled[i] = sd * xi[i];
      a = continuum_grad(RegretState(std::span<const double>(scaled.data(), n)));
      for (int i = 0; i < n; ++i) a[i] = std::clamp(a[i], 0.0, 1.0);
      break;
    }
    case PlayerKind::Uniform:
      for (int i = 0; i < n; ++i) a[i] = 1.0;
      break;
    case PlayerKind::FollowLeader: {
      const double top = phi(xi);
      for (int i = 0; i < n; ++i) a[i] = xi[i] == top ? 1.0 : 0.0;
      break;
    }
    case PlayerKind::MultiplicativeWeights: {
      const double top = phi(xi);
      for (int i = 0; i < n; ++i) a[i] = std::exp(p.eta * (xi[i] - top));
      break;
    }
  }
  const double sum = std::accumulate(a.begin(), a.begin() + n, 0.0);
  for (int i = 0; i < n; ++i) a[i] /= sum;
  return a;
}

void SimConfig::validate() const {
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("SimConfig: delta must lie in (0, 1]");
  if (n_episodes < 1)
    throw std::invalid_argument("SimConfig: n_episodes must be >= 1");
  if (threads < 1) throw std::invalid_argument("SimConfig: threads must be >= 1");
  nature.validate(x0.size());
}

std::int64_t stopping_time(double u, double delta) {
  if (delta >= 1.0) return 0;
  return static_cast<std::int64_t>(std::floor(std::log1p(-u) / std::log1p(-delta)));
}

GameTrace simulate_episode(const SimConfig& cfg, Stream& rng) {
  cfg.validate();
  GameTrace trace;
  run_episode(cfg, rng, &trace);
  return trace;
}

SimResult estimate_regret(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = static_cast<std::size_t>(cfg.n_episodes);
  std::vector<double> regret(n);
  std::vector<double> stop(n);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t e = lo; e < hi; ++e) {
      Stream rng = make_stream(cfg.seed, e);
      const EpisodeOutcome o = run_episode(cfg, rng, nullptr);
      regret[e] = o.regret;
      stop[e] = static_cast<double>(o.t);
    }
  };
  const std::size_t t = std::min<std::size_t>(cfg.threads, n);
  if (t <= 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < t; ++k)
      pool.emplace_back(work, n * k / t, n * (k + 1) / t);
    for (auto& th : pool) th.join();
  }

  auto moments = [n](const std::vector<double>& v, double& mean, double& se) {
    double s = 0.0;
    for (double x : v) s += x;
    mean = s / static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))
               : 0.0;
  };
  SimResult r;
  r.n = cfg.n_episodes;
  r.config = cfg;
  moments(regret, r.mean, r.std_error);
  moments(stop, r.mean_T, r.std_error_T);
  return r;
}

std::string SimResult::csv_header() {
  return "delta,x0,nature,player,n,mean,stderr,mean_T,seed";
}

std::string SimResult::csv_row() const {
  std::ostringstream os;
  os << format17(config.delta) << ',';
  for (int i = 0; i < config.x0.size(); ++i)
    os << (i ? " " : "") << format17(config.x0[i]);
  // Subset names contain commas, so quote the policy fields.
  os << ",\"" << config.nature.name() << "\",\"" << config.player.name()
     << "\"," << n << ',' << format17(mean) << ',' << format17(std_error)
     << ',' << format17(mean_T) << ',' << config.seed;
  return os.str();
}

void to_json(nlohmann::json& j, const SimResult& r) {
  j = nlohmann::json{
      {"delta", r.config.delta},
      {"x0", std::vector<double>(r.config.x0.begin(), r.config.x0.end())},
      {"nature", r.config.nature.name()},
      {"player", r.config.player.name()},
      {"seed", r.config.seed},
      {"n", r.n},
      {"mean", r.mean},
      {"stderr", r.std_error},
      {"mean_T", r.mean_T},
      {"stderr_T", r.std_error_T},
  };
}

}  // namespace expertgame
