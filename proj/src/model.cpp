#include "seqlqg/model.hpp"

#include <cmath>
#include <sstream>

namespace seqlqg {
namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kPmfTol = 1e-12;

std::string dims(const MatrixXd& M) {
    std::ostringstream os;
    os << M.rows() << "x" << M.cols();
    return os.str();
}

void require_shape(const MatrixXd& M, Eigen::Index rows, Eigen::Index cols, const std::string& field) {
    if (M.rows() != rows || M.cols() != cols) {
        std::ostringstream os;
        os << "dimension mismatch: expected " << rows << "x" << cols << ", got " << dims(M);
        throw ConfigError(field, os.str());
    }
}

void require_symmetric(const MatrixXd& M, const std::string& field) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw ConfigError(field, field.substr(field.rfind('.') + 1) + " not symmetric");
    }
}

double min_eigenvalue(const MatrixXd& M) {
    if (M.size() == 0) return 0.0;
    const MatrixXd S = 0.5 * (M + M.transpose());
    return Eigen::SelfAdjointEigenSolver<MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

std::string short_name(const std::string& field) { return field.substr(field.rfind('.') + 1); }

void require_psd(const MatrixXd& M, const std::string& field) {
    require_symmetric(M, field);
    const double scale = M.size() == 0 ? 1.0 : std::max(1.0, M.cwiseAbs().maxCoeff());
    if (min_eigenvalue(M) < -kSymmetryTol * scale) {
        throw ConfigError(field, short_name(field) + " not positive semidefinite");
    }
}

void require_pd(const MatrixXd& M, const std::string& field) {
    require_symmetric(M, field);
    if (M.size() == 0 || !(min_eigenvalue(M) > 0.0)) {
        throw ConfigError(field, short_name(field) + " not positive definite");
    }
}

}  // namespace

void validate_pmf(const DelayPmf& pmf, const std::string& field) {
    double mass = pmf.loss;
    if (!(pmf.loss >= 0.0 && pmf.loss <= 1.0)) {
        throw ConfigError(field, "loss probability outside [0,1]");
    }
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        if (!(pmf.probs[i] >= 0.0 && pmf.probs[i] <= 1.0)) {
            throw ConfigError(field, "probability q_" + std::to_string(i) + " outside [0,1]");
        }
        mass += pmf.probs[i];
    }
    if (std::abs(mass - 1.0) > kPmfTol) {
        std::ostringstream os;
        os << "PMF mass " << mass << " ≠ 1";
        throw ConfigError(field, os.str());
    }
}

ValidatedConfig validate(const PlantModel& plant, const CostWeights& weights, const DelayPmf& ca,
                         const DelayPmf& sc, const SequenceConfig& seq) {
    const Eigen::Index n = plant.A.rows();
    if (n == 0 || plant.A.cols() != n) throw ConfigError("plant.A", "A must be square and non-empty");
    const Eigen::Index m = plant.B.cols();
    if (m == 0) throw ConfigError("plant.B", "B must have at least one column");
    require_shape(plant.B, n, m, "plant.B");
    const Eigen::Index q = plant.C.rows();
    if (q == 0) throw ConfigError("plant.C", "C must have at least one row");
    require_shape(plant.C, q, n, "plant.C");
    require_shape(plant.W, n, n, "plant.W");
    require_shape(plant.V, q, q, "plant.V");
    if (plant.x0_mean.size() != n) throw ConfigError("plant.x0_mean", "dimension mismatch");
    require_shape(plant.x0_cov, n, n, "plant.x0_cov");

    require_psd(plant.W, "plant.W");
    require_pd(plant.V, "plant.V");
    require_psd(plant.x0_cov, "plant.x0_cov");

    require_shape(weights.Q, n, n, "cost.Q");
    require_shape(weights.R, m, m, "cost.R");
    require_shape(weights.Q_terminal, n, n, "cost.Q_terminal");
    require_psd(weights.Q, "cost.Q");
    require_pd(weights.R, "cost.R");
    require_psd(weights.Q_terminal, "cost.Q_terminal");
    if (weights.horizon < 1) throw ConfigError("cost.horizon", "horizon must be positive");

    validate_pmf(ca, "network.ca");
    validate_pmf(sc, "network.sc");

    if (seq.N < 0) throw ConfigError("sequence.N", "N must be nonnegative");
    if (seq.u_default.size() != m) throw ConfigError("sequence.u_default", "dimension mismatch");

    return ValidatedConfig{plant, weights, ca, sc, seq};
}

ValidatedConfig validate(const ValidatedConfig& config) {
    return validate(config.plant, config.weights, config.ca, config.sc, config.seq);
}

Benchmark double_integrator_benchmark() {
    Benchmark b;
    b.plant.A = (MatrixXd(2, 2) << 1, 1, 0, 1).finished();
    b.plant.B = (MatrixXd(2, 1) << 0, 1).finished();
    b.plant.C = (MatrixXd(1, 2) << 1, 0).finished();
    b.plant.W = 0.1 * 0.1 * MatrixXd::Identity(2, 2);
    b.plant.V = MatrixXd::Constant(1, 1, 0.2 * 0.2);
    b.plant.x0_mean = (VectorXd(2) << 100, 0).finished();
    b.plant.x0_cov = 0.5 * 0.5 * MatrixXd::Identity(2, 2);

    b.weights.Q = MatrixXd::Identity(2, 2);
    b.weights.R = MatrixXd::Identity(1, 1);
    b.weights.Q_terminal = MatrixXd::Identity(2, 2);
    b.weights.horizon = 40;

    b.seq.N = 0;
    b.seq.u_default = VectorXd::Zero(1);
    return b;
}

double stage_cost(const VectorXd& x, const VectorXd& u, const CostWeights& weights) {
    if (x.size() != weights.Q.rows() || u.size() != weights.R.rows()) {
        throw std::invalid_argument("stage_cost: dimension mismatch");
    }
    return x.dot(weights.Q * x) + u.dot(weights.R * u);
}

double terminal_cost(const VectorXd& x, const CostWeights& weights) {
    if (x.size() != weights.Q_terminal.rows()) {
        throw std::invalid_argument("terminal_cost: dimension mismatch");
    }
    return x.dot(weights.Q_terminal * x);
}

}  // namespace seqlqg
