#pragma once

#include <stdexcept>
#include <utility>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace seqlqg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raised when a configuration value violates a model invariant. `field()`
/// names the offending entry (e.g. "plant.V" or "network.ca").
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/**
 * Linear stochastic plant
 *
 *   x_{k+1} = A x_k + B u_k + w_k,   w_k ~ N(0, W)
 *   y_k     = C x_k + v_k,           v_k ~ N(0, V)
 *   x_0     ~ N(x0_mean, x0_cov)
 */
struct PlantModel {
    MatrixXd A;
    MatrixXd B;
    MatrixXd C;
    MatrixXd W;
    MatrixXd V;
    VectorXd x0_mean;
    MatrixXd x0_cov;

    [[nodiscard]] Eigen::Index state_dim() const { return A.rows(); }
    [[nodiscard]] Eigen::Index input_dim() const { return B.cols(); }
    [[nodiscard]] Eigen::Index output_dim() const { return C.rows(); }
};

/// Quadratic stage weights (constant over the horizon) plus terminal weight.
struct CostWeights {
    MatrixXd Q;
    MatrixXd R;
    MatrixXd Q_terminal;
    int horizon = 1;
};

/// Finite-support delay distribution of one link. probs[i] is the probability
/// that a packet arrives i steps after it was sent; `loss` is the mass of
/// packets that never arrive.
struct DelayPmf {
    std::vector<double> probs;
    double loss = 0.0;

    /// Probability of a delay of exactly `steps` (zero outside the support).
    [[nodiscard]] double at(int steps) const {
        return steps >= 0 && static_cast<std::size_t>(steps) < probs.size() ? probs[steps] : 0.0;
    }
};

/// Sequence length N (the sequence holds N+1 inputs) and the actuator's
/// default input.
struct SequenceConfig {
    int N = 0;
    VectorXd u_default;
};

/// A configuration whose every invariant has been checked by `validate`.
struct ValidatedConfig {
    PlantModel plant;
    CostWeights weights;
    DelayPmf ca;
    DelayPmf sc;
    SequenceConfig seq;
};

ValidatedConfig validate(const PlantModel& plant, const CostWeights& weights, const DelayPmf& ca,
                         const DelayPmf& sc, const SequenceConfig& seq);

/// Re-validates an already validated configuration; returns it unchanged.
ValidatedConfig validate(const ValidatedConfig& config);

/// Throws ConfigError(field, ...) unless the PMF entries lie in [0,1] and sum to one.
void validate_pmf(const DelayPmf& pmf, const std::string& field);

struct Benchmark {
    PlantModel plant;
    CostWeights weights;
    SequenceConfig seq;
};

/// Double integrator with position measurement, x0 = [100, 0], horizon 40.
Benchmark double_integrator_benchmark();

double stage_cost(const VectorXd& x, const VectorXd& u, const CostWeights& weights);
double terminal_cost(const VectorXd& x, const CostWeights& weights);

}  // namespace seqlqg
