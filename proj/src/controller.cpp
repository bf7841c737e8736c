#include "seqlqg/controller.hpp"

#include <ostream>
#include <stdexcept>

#include "seqlqg/format.hpp"

namespace seqlqg {

MatrixXd pseudoinverse(const MatrixXd& M, double tol) {
    if (M.rows() != M.cols()) throw std::invalid_argument("pseudoinverse: matrix not square");
    if (M.size() == 0) return M;
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
        throw std::invalid_argument("pseudoinverse: matrix not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (M + M.transpose()));
    const VectorXd& lambda = es.eigenvalues();
    const double cutoff = tol * lambda.cwiseAbs().maxCoeff();
    VectorXd inv = VectorXd::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda[i] > cutoff) inv[i] = 1.0 / lambda[i];
    }
    const MatrixXd& V = es.eigenvectors();
    MatrixXd out = V * inv.asDiagonal() * V.transpose();
    return 0.5 * (out + out.transpose());
}

GainSchedule backward_recursion(const AugmentedModel& model, const TransitionMatrix& T, const CostWeights& weights) {
    const int modes = model.mode_count();
    if (T.modes() != modes) throw std::invalid_argument("backward_recursion: T and model disagree on N");
    const int K = weights.horizon;

    GainSchedule sched;
    sched.horizon = K;
    sched.N = model.N;
    sched.L.assign(K, std::vector<MatrixXd>(modes));
    sched.P.assign(K, std::vector<MatrixXd>(modes));
    sched.EK.assign(K + 1, std::vector<MatrixXd>(modes, model.Q_tilde_terminal));

    const Eigen::Index nx = model.xi_dim();
    const Eigen::Index ns = model.sequence_dim();

    for (int k = K - 1; k >= 0; --k) {
        const auto& next = sched.EK[k + 1];
        for (int j = 0; j < modes; ++j) {
            MatrixXd S_R = MatrixXd::Zero(ns, ns);
            MatrixXd S_BA = MatrixXd::Zero(ns, nx);
            MatrixXd S_QA = MatrixXd::Zero(nx, nx);
            for (int i = 0; i < modes; ++i) {
                const double p = T(j, i);
                if (p == 0.0) continue;
                const ModeMatrices& mi = model.modes[i];
                const MatrixXd KB = next[i] * mi.B_tilde;
                const MatrixXd KA = next[i] * mi.A_tilde;
                S_R += p * (mi.R_tilde + mi.B_tilde.transpose() * KB);
                S_BA += p * (mi.B_tilde.transpose() * KA);
                S_QA += p * (mi.Q_tilde + mi.A_tilde.transpose() * KA);
            }
            const MatrixXd S_R_sym = 0.5 * (S_R + S_R.transpose());
            const MatrixXd pinv = pseudoinverse(S_R_sym);
            const MatrixXd L = -pinv * S_BA;
            MatrixXd P = S_BA.transpose() * pinv * S_BA;
            P = 0.5 * (P + P.transpose());
            MatrixXd EK = S_QA - P;
            sched.L[k][j] = L;
            sched.P[k][j] = P;
            sched.EK[k][j] = 0.5 * (EK + EK.transpose());
        }
    }
    return sched;
}

GainSchedule zero_schedule(const AugmentedModel& model, int horizon) {
    const int modes = model.mode_count();
    GainSchedule sched;
    sched.horizon = horizon;
    sched.N = model.N;
    sched.L.assign(horizon, std::vector<MatrixXd>(modes, MatrixXd::Zero(model.sequence_dim(), model.xi_dim())));
    sched.P.assign(horizon, std::vector<MatrixXd>(modes, MatrixXd::Zero(model.xi_dim(), model.xi_dim())));
    sched.EK.assign(horizon + 1, std::vector<MatrixXd>(modes, MatrixXd::Zero(model.xi_dim(), model.xi_dim())));
    return sched;
}

ControlSequence control_sequence(const GainSchedule& sched, int k, int theta_prev, const VectorXd& xi_hat,
                                 Eigen::Index input_dim) {
    if (k < 0 || k >= sched.horizon) throw std::out_of_range("control_sequence: step outside the horizon");
    if (theta_prev < 0 || theta_prev >= sched.mode_count()) {
        throw std::out_of_range("control_sequence: mode out of range");
    }
    const MatrixXd& L = sched.L[k][theta_prev];
    if (L.cols() != xi_hat.size()) throw std::invalid_argument("control_sequence: estimate has wrong dimension");
    return ControlSequence{k, L * xi_hat, input_dim};
}

void dump_gains(std::ostream& os, const GainSchedule& sched, const std::string& prefix) {
    auto write = [&](int k, int j, const char* kind, const MatrixXd& M) {
        os << prefix << k << ',' << j << ',' << kind << ',' << M.rows() << ',' << M.cols();
        for (Eigen::Index r = 0; r < M.rows(); ++r) {
            for (Eigen::Index c = 0; c < M.cols(); ++c) os << ',' << format_double(M(r, c));
        }
        os << '\n';
    };
    for (int k = 0; k <= sched.horizon; ++k) {
        for (int j = 0; j < sched.mode_count(); ++j) {
            if (k < sched.horizon) write(k, j, "L", sched.L[k][j]);
            write(k, j, "EK", sched.EK[k][j]);
        }
    }
}

}  // namespace seqlqg
