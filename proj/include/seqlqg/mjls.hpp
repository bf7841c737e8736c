#pragma once

#include <vector>

#include "seqlqg/model.hpp"

namespace seqlqg {

/// Dimension of η for sequence tail length N and input dimension m:
/// m + m(1 + 2 + ... + N).
Eigen::Index eta_dim(int N, Eigen::Index m);

/// Transition matrix of the buffer-age chain θ ∈ {0, ..., N+1}.
/// p(i, j) = Prob[θ_{k+1} = j | θ_k = i].
struct TransitionMatrix {
    MatrixXd p;

    [[nodiscard]] int modes() const { return static_cast<int>(p.rows()); }
    [[nodiscard]] double operator()(int i, int j) const { return p(i, j); }
};

/// Builds T from the controller-to-actuator delay PMF. Delays larger than N
/// are treated as losses.
TransitionMatrix build_transition_matrix(const DelayPmf& ca, int N);

/// Mode-dependent matrices of the augmented system ξ = [x; η] for θ = mode.
struct ModeMatrices {
    MatrixXd H;        // m x d, picks the applied input out of η
    MatrixXd J;        // m x m(N+1), picks the applied input out of U_k
    MatrixXd A_tilde;  // (n+d) x (n+d)
    MatrixXd B_tilde;  // (n+d) x m(N+1)
    MatrixXd Q_tilde;  // blockdiag(Q, Hᵀ R H)
    MatrixXd R_tilde;  // Jᵀ R J
};

/**
 * Network/actuator state-space model
 *
 *   η_{k+1} = F η_k + G U_k,   u_k = H_θ η_k + J_θ U_k,
 *   ξ_{k+1} = Ã_θ ξ_k + B̃_θ U_k + [w_k; 0].
 *
 * Layout of η: block j (j = 1..N) holds the still-pending entries
 * u_{k|k-j}, ..., u_{k+N-j|k-j} of U_{k-j}; the last m entries hold u^d.
 */
struct AugmentedModel {
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    int N = 0;
    Eigen::Index d = 0;
    MatrixXd F;
    MatrixXd G;
    std::vector<ModeMatrices> modes;  // indexed by θ = 0..N+1
    MatrixXd Q_tilde_terminal;

    [[nodiscard]] Eigen::Index xi_dim() const { return n + d; }
    [[nodiscard]] Eigen::Index sequence_dim() const { return m * (N + 1); }
    [[nodiscard]] int mode_count() const { return N + 2; }

    /// Row offset of η block j (1..N) inside η; j = N+1 gives the u^d slot.
    [[nodiscard]] Eigen::Index eta_block_offset(int j) const;

    /// η_0: every slot filled with the default input (the actuator starts
    /// from a default-valued sequence).
    [[nodiscard]] VectorXd initial_eta(const VectorXd& u_default) const;
};

AugmentedModel build_augmented(const PlantModel& plant, const CostWeights& weights, const SequenceConfig& seq);

}  // namespace seqlqg
