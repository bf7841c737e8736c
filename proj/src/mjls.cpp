#include "seqlqg/mjls.hpp"

#include <stdexcept>

namespace seqlqg {

Eigen::Index eta_dim(int N, Eigen::Index m) {
    if (N < 0 || m < 1) throw std::invalid_argument("eta_dim: need N >= 0 and m >= 1");
    return m + m * static_cast<Eigen::Index>(N) * (N + 1) / 2;
}

TransitionMatrix build_transition_matrix(const DelayPmf& ca, int N) {
    validate_pmf(ca, "network.ca");
    if (N < 0) throw std::invalid_argument("build_transition_matrix: N must be nonnegative");

    const int r = N + 1;
    TransitionMatrix T{MatrixXd::Zero(r + 1, r + 1)};
    // Only delays 0..N can ever put a sequence to use; the rest acts as loss.
    for (int i = 0; i <= r; ++i) {
        double arrived = 0.0;
        for (int j = 0; j <= std::min(i, N); ++j) {
            T.p(i, j) = ca.at(j);
            arrived += ca.at(j);
        }
        // Age grows by one, or stays saturated at N+1.
        T.p(i, std::min(i + 1, r)) += std::max(0.0, 1.0 - arrived);
    }
    return T;
}

Eigen::Index AugmentedModel::eta_block_offset(int j) const {
    if (j < 1 || j > N + 1) throw std::out_of_range("eta_block_offset: block index out of range");
    Eigen::Index offset = 0;
    for (int l = 1; l < j; ++l) offset += m * (N - l + 1);
    return offset;
}

VectorXd AugmentedModel::initial_eta(const VectorXd& u_default) const {
    return u_default.replicate(d / m, 1);
}

AugmentedModel build_augmented(const PlantModel& plant, const CostWeights& weights, const SequenceConfig& seq) {
    AugmentedModel M;
    M.n = plant.state_dim();
    M.m = plant.input_dim();
    M.N = seq.N;
    M.d = eta_dim(seq.N, M.m);
    const Eigen::Index n = M.n;
    const Eigen::Index m = M.m;
    const Eigen::Index d = M.d;
    const Eigen::Index s = M.sequence_dim();
    const int N = seq.N;

    // Block j+1 of η_{k+1} is block j of η_k without its first entry; block 1
    // receives the tail of U_k; block N of η_k expires.
    M.F = MatrixXd::Zero(d, d);
    M.G = MatrixXd::Zero(d, s);
    for (int j = 2; j <= N; ++j) {
        const Eigen::Index len = m * (N - j + 1);
        M.F.block(M.eta_block_offset(j), M.eta_block_offset(j - 1) + m, len, len).setIdentity();
    }
    const Eigen::Index ud = M.eta_block_offset(N + 1);
    M.F.block(ud, ud, m, m).setIdentity();
    if (N >= 1) M.G.block(0, m, m * N, m * N).setIdentity();

    const MatrixXd& R = weights.R;
    M.modes.resize(N + 2);
    for (int i = 0; i <= N + 1; ++i) {
        ModeMatrices& mode = M.modes[i];
        mode.H = MatrixXd::Zero(m, d);
        mode.J = MatrixXd::Zero(m, s);
        if (i == 0) {
            mode.J.leftCols(m).setIdentity();
        } else {
            mode.H.block(0, M.eta_block_offset(i), m, m).setIdentity();
        }

        mode.A_tilde = MatrixXd::Zero(n + d, n + d);
        mode.A_tilde.topLeftCorner(n, n) = plant.A;
        mode.A_tilde.topRightCorner(n, d) = plant.B * mode.H;
        mode.A_tilde.bottomRightCorner(d, d) = M.F;

        mode.B_tilde = MatrixXd(n + d, s);
        mode.B_tilde.topRows(n) = plant.B * mode.J;
        mode.B_tilde.bottomRows(d) = M.G;

        mode.Q_tilde = MatrixXd::Zero(n + d, n + d);
        mode.Q_tilde.topLeftCorner(n, n) = weights.Q;
        mode.Q_tilde.bottomRightCorner(d, d) = mode.H.transpose() * R * mode.H;

        mode.R_tilde = mode.J.transpose() * R * mode.J;
    }

    M.Q_tilde_terminal = MatrixXd::Zero(n + d, n + d);
    M.Q_tilde_terminal.topLeftCorner(n, n) = weights.Q_terminal;
    return M;
}

}  // namespace seqlqg
