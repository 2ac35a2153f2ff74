#include "p2pcast/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace p2pcast {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

// exp-normalize a vector of log weights into probabilities.
Eigen::VectorXd softmax_of_logs(const Eigen::VectorXd& logw) {
  const double m = logw.maxCoeff();
  Eigen::VectorXd p = (logw.array() - m).exp();
  return p / p.sum();
}

}  // namespace

void check_distribution(const DistributionVector& p, double tol) {
  if (static_cast<int>(p.support.size()) != p.probs.size())
    throw std::invalid_argument("distribution support/probs size mismatch");
  if (p.probs.size() == 0) throw std::invalid_argument("empty distribution");
  if (p.probs.minCoeff() < 0.0)
    throw std::invalid_argument("negative probability");
  if (std::abs(p.probs.sum() - 1.0) > tol)
    throw std::invalid_argument("probabilities do not sum to 1");
}

void NoiseModel::validate() const {
  if (per_config.empty()) throw std::invalid_argument("empty noise model");
  for (const auto& c : per_config) {
    if (c.delta < 0.0) throw std::invalid_argument("negative noise bound");
    if (c.n < 1) throw std::invalid_argument("noise discretization n < 1");
    if (c.eta.size() != 2 * c.n + 1)
      throw std::invalid_argument("eta must have 2n+1 entries");
    if (c.eta.minCoeff() < 0.0)
      throw std::invalid_argument("negative eta weight");
    if (std::abs(c.eta.sum() - 1.0) > 1e-9)
      throw std::invalid_argument("eta weights must sum to 1");
  }
}

NoiseModel zero_noise(int configs) {
  NoiseModel m;
  for (int i = 0; i < configs; ++i) {
    ConfigNoise c;
    c.delta = 0.0;
    c.n = 1;
    c.eta = Eigen::Vector3d(0.0, 1.0, 0.0);
    m.per_config.push_back(std::move(c));
  }
  return m;
}

NoiseModel uniform_noise(int configs, double delta, int n) {
  NoiseModel m;
  for (int i = 0; i < configs; ++i) {
    ConfigNoise c;
    c.delta = delta;
    c.n = n;
    c.eta = Eigen::VectorXd::Constant(2 * n + 1, 1.0 / (2 * n + 1));
    m.per_config.push_back(std::move(c));
  }
  return m;
}

double log_sum_exp_rate(const Eigen::VectorXd& x, double beta) {
  if (x.size() == 0) throw std::invalid_argument("empty rate vector");
  if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
  const double m = x.maxCoeff();
  const double s = ((x.array() - m) * beta).exp().sum();
  return m + std::log(s) / beta;
}

DistributionVector optimal_distribution(const Eigen::VectorXd& x,
                                        double beta) {
  if (x.size() == 0) throw std::invalid_argument("empty rate vector");
  if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
  DistributionVector d;
  d.support.resize(x.size());
  for (int i = 0; i < x.size(); ++i) d.support[i] = i;
  d.probs = softmax_of_logs(beta * x);
  return d;
}

ExtendedChain extended_chain(const Eigen::VectorXd& x, const NoiseModel& noise,
                             double beta, double tau,
                             const std::vector<std::pair<int, int>>& adjacency) {
  noise.validate();
  const int F = static_cast<int>(x.size());
  if (static_cast<int>(noise.per_config.size()) != F)
    throw std::invalid_argument("noise model size != number of rates");

  ExtendedChain chain;
  std::vector<int> first_state(F);
  for (int f = 0; f < F; ++f) {
    const auto& cn = noise.per_config[f];
    first_state[f] = static_cast<int>(chain.states.size());
    for (int j = -cn.n; j <= cn.n; ++j)
      chain.states.emplace_back(f, j);
  }
  const int S = static_cast<int>(chain.states.size());
  chain.observed.resize(S);
  for (int i = 0; i < S; ++i) {
    const auto [f, j] = chain.states[i];
    const auto& cn = noise.per_config[f];
    chain.observed[i] = x[f] + cn.delta * j / cn.n;
  }

  chain.rates = Eigen::MatrixXd::Zero(S, S);
  const double leave = std::exp(-tau);
  const auto connect = [&](int f, int fp) {
    const auto& cn_f = noise.per_config[f];
    const auto& cn_fp = noise.per_config[fp];
    for (int a = first_state[f]; a < first_state[f] + 2 * cn_f.n + 1; ++a) {
      for (int b = first_state[fp]; b < first_state[fp] + 2 * cn_fp.n + 1;
           ++b) {
        const double eta_b = cn_fp.eta[b - first_state[fp]];
        const double t = beta * (chain.observed[a] - chain.observed[b]);
        chain.rates(a, b) = eta_b * leave / (1.0 + std::exp(t));
      }
    }
  };
  for (const auto& [f, fp] : adjacency) {
    if (f == fp || f < 0 || fp < 0 || f >= F || fp >= F)
      throw std::invalid_argument("bad adjacency pair");
    connect(f, fp);
    connect(fp, f);
  }
  chain.rates.diagonal() = -chain.rates.rowwise().sum();
  return chain;
}

ExtendedStationary stationary_extended(const Eigen::VectorXd& x,
                                       const NoiseModel& noise, double beta) {
  noise.validate();
  const int F = static_cast<int>(x.size());
  if (static_cast<int>(noise.per_config.size()) != F)
    throw std::invalid_argument("noise model size != number of rates");

  ExtendedStationary out;
  std::vector<double> state_logw;
  for (int f = 0; f < F; ++f) {
    const auto& cn = noise.per_config[f];
    for (int j = -cn.n; j <= cn.n; ++j) {
      out.states.emplace_back(f, j);
      const double observed = x[f] + cn.delta * j / cn.n;
      state_logw.push_back(safe_log(cn.eta[j + cn.n]) + beta * observed);
    }
  }
  out.p_tilde = softmax_of_logs(Eigen::Map<const Eigen::VectorXd>(
      state_logw.data(), static_cast<int>(state_logw.size())));

  // Configuration marginal via log alpha_f = LSE_j(log eta + beta j/n delta).
  Eigen::VectorXd config_logw(F);
  for (int f = 0; f < F; ++f) {
    const auto& cn = noise.per_config[f];
    double m = kNegInf;
    for (int j = -cn.n; j <= cn.n; ++j)
      m = std::max(m, safe_log(cn.eta[j + cn.n]) + beta * cn.delta * j / cn.n);
    double s = 0.0;
    for (int j = -cn.n; j <= cn.n; ++j) {
      const double lw = safe_log(cn.eta[j + cn.n]) + beta * cn.delta * j / cn.n;
      if (lw > kNegInf) s += std::exp(lw - m);
    }
    config_logw[f] = m + std::log(s) + beta * x[f];
  }
  out.p_bar = softmax_of_logs(config_logw);

  // The two closed forms are algebraically identical; catch numerical drift.
  Eigen::VectorXd grouped = Eigen::VectorXd::Zero(F);
  for (std::size_t i = 0; i < out.states.size(); ++i)
    grouped[out.states[i].first] += out.p_tilde[i];
  if ((grouped - out.p_bar).cwiseAbs().maxCoeff() > 1e-12)
    throw std::logic_error("stationary closed forms disagree");
  return out;
}

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("tv_distance: size mismatch");
  return 0.5 * (p - q).cwiseAbs().sum();
}

double tv_distance(const DistributionVector& p, const DistributionVector& q) {
  if (p.support != q.support)
    throw std::invalid_argument("tv_distance: support mismatch");
  return tv_distance(p.probs, q.probs);
}

NoiseImpact noise_impact_bounds(const Eigen::VectorXd& x,
                                const NoiseModel& noise, double beta) {
  noise.validate();
  double delta_max = 0.0;
  for (const auto& c : noise.per_config)
    delta_max = std::max(delta_max, c.delta);
  const double x_max = x.maxCoeff();

  NoiseImpact r;
  r.tv_bound = 1.0 - std::exp(-2.0 * beta * delta_max);
  r.rate_gap_bound = 2.0 * x_max * r.tv_bound;

  const DistributionVector p_star = optimal_distribution(x, beta);
  const ExtendedStationary st = stationary_extended(x, noise, beta);
  r.tv_actual = tv_distance(p_star.probs, st.p_bar);
  r.rate_gap_actual = std::abs(p_star.probs.dot(x) - st.p_bar.dot(x));
  return r;
}

}  // namespace p2pcast
