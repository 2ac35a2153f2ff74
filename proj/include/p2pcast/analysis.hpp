#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace p2pcast {

// Probability vector over an enumerated configuration space.
struct DistributionVector {
  std::vector<int> support;  // configuration ids, ascending
  Eigen::VectorXd probs;
};

void check_distribution(const DistributionVector& p, double tol = 1e-9);

// Discrete observation-noise model: the observed rate of configuration f is
// x_f + (j/n_f) * delta_f with probability eta_{j,f}, j in {-n_f..n_f}.
struct ConfigNoise {
  double delta = 0.0;
  int n = 1;
  Eigen::VectorXd eta;  // size 2n+1, index j + n
};

struct NoiseModel {
  std::vector<ConfigNoise> per_config;
  void validate() const;
};

NoiseModel zero_noise(int configs);
NoiseModel uniform_noise(int configs, double delta, int n);

// (1/beta) log sum_f exp(beta x_f), max-subtracted.
double log_sum_exp_rate(const Eigen::VectorXd& x, double beta);

// Softmax p*_f = exp(beta x_f) / sum exp(beta x_f'), max-subtracted.
DistributionVector optimal_distribution(const Eigen::VectorXd& x, double beta);

// Continuous-time chain over (configuration, observed rate) states.
// Adjacency lists the unordered configuration pairs that are one
// add/remove move apart; states of adjacent configurations are fully
// interconnected with the noise-weighted logistic rates.
struct ExtendedChain {
  std::vector<std::pair<int, int>> states;  // (config id, offset j)
  Eigen::VectorXd observed;                 // x_f + (j/n_f) delta_f
  Eigen::MatrixXd rates;                    // generator, rows sum to zero
};

ExtendedChain extended_chain(const Eigen::VectorXd& x, const NoiseModel& noise,
                             double beta, double tau,
                             const std::vector<std::pair<int, int>>& adjacency);

// Closed-form stationary distribution of the extended chain: per-state
// p~ proportional to eta * exp(beta * observed rate), and the configuration
// marginal via the averaged-noise coefficients alpha_f. Both forms are
// computed in log space and cross-checked.
struct ExtendedStationary {
  std::vector<std::pair<int, int>> states;
  Eigen::VectorXd p_tilde;  // per extended state
  Eigen::VectorXd p_bar;    // per configuration
};

ExtendedStationary stationary_extended(const Eigen::VectorXd& x,
                                       const NoiseModel& noise, double beta);

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
double tv_distance(const DistributionVector& p, const DistributionVector& q);

// Noise-robustness bounds together with the realized quantities:
// d_TV(p*, p_bar) <= 1 - exp(-2 beta delta_max) and the rate gap
// |p* . x - p_bar . x| <= 2 x_max (1 - exp(-2 beta delta_max)).
struct NoiseImpact {
  double tv_bound = 0.0;
  double rate_gap_bound = 0.0;
  double tv_actual = 0.0;
  double rate_gap_actual = 0.0;
};

NoiseImpact noise_impact_bounds(const Eigen::VectorXd& x,
                                const NoiseModel& noise, double beta);

}  // namespace p2pcast
