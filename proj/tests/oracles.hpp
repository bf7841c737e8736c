#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library code paths they are compared against.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Classical finite-horizon LQR: returns gains L_k (u_k = L_k x_k) and cost
/// matrices P_0..P_K with P_K = Q_terminal.
struct LqrSolution {
    std::vector<MatrixXd> L;
    std::vector<MatrixXd> P;
};

inline LqrSolution finite_horizon_lqr(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R,
                                      const MatrixXd& Q_terminal, int K) {
    LqrSolution s;
    s.L.resize(K);
    s.P.resize(K + 1);
    s.P[K] = Q_terminal;
    for (int k = K - 1; k >= 0; --k) {
        const MatrixXd& P = s.P[k + 1];
        const MatrixXd S = R + B.transpose() * P * B;
        s.L[k] = -S.inverse() * B.transpose() * P * A;
        s.P[k] = Q + A.transpose() * P * A + A.transpose() * P * B * s.L[k];
    }
    return s;
}

/// Textbook Kalman filter over a step-indexed set of measurements
/// (standard covariance update, explicit inverse).
struct KalmanRun {
    std::vector<VectorXd> mean;
    std::vector<MatrixXd> cov;
};

inline KalmanRun kalman_from_scratch(const MatrixXd& A, const MatrixXd& B, const MatrixXd& C, const MatrixXd& W,
                                     const MatrixXd& V, const VectorXd& x0, const MatrixXd& P0,
                                     const std::vector<VectorXd>& inputs, const std::map<int, VectorXd>& measurements,
                                     int last_step) {
    KalmanRun run;
    VectorXd x = x0;
    MatrixXd P = P0;
    for (int t = 0; t <= last_step; ++t) {
        if (t > 0) {
            x = A * x + B * inputs[t - 1];
            P = A * P * A.transpose() + W;
        }
        if (auto it = measurements.find(t); it != measurements.end()) {
            const MatrixXd S = C * P * C.transpose() + V;
            const MatrixXd K = P * C.transpose() * S.inverse();
            x = x + K * (it->second - C * x);
            P = (MatrixXd::Identity(P.rows(), P.cols()) - K * C) * P;
        }
        run.mean.push_back(x);
        run.cov.push_back(P);
    }
    return run;
}

/// Buffer age straight from the delay realizations: the age of the newest
/// sequence that has arrived by step k, or N+1 when that age exceeds N.
/// delays[m] < 0 marks a lost sequence.
inline int buffer_age(const std::vector<int>& delays, int k, int N) {
    for (int age = 0; age <= std::min(N, k); ++age) {
        const int origin = k - age;
        if (delays[origin] >= 0 && origin + delays[origin] <= k) return age;
    }
    return N + 1;
}

/// Half-width of a 3σ binomial band for a proportion p estimated from n trials.
inline double three_sigma(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

inline MatrixXd random_psd(std::mt19937_64& rng, int dim, int rank) {
    std::normal_distribution<double> normal;
    MatrixXd F(dim, rank);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < rank; ++j) F(i, j) = normal(rng);
    return F * F.transpose();
}

}  // namespace oracle
