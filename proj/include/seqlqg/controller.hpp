#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "seqlqg/actuator.hpp"
#include "seqlqg/mjls.hpp"

namespace seqlqg {

inline constexpr double kPinvTolerance = 1e-10;

/**
 * Moore-Penrose pseudoinverse of a symmetric positive semidefinite matrix.
 *
 * Computed from the symmetric eigendecomposition; eigenvalues at or below
 * `tol * λ_max` are treated as zero. Throws std::invalid_argument if `M`
 * deviates from symmetry by more than `tol` (relative to its largest entry).
 */
MatrixXd pseudoinverse(const MatrixXd& M, double tol = kPinvTolerance);

/**
 * Per-step, per-mode feedback gains of the sequence-based controller.
 *
 * L[k][j] maps E{ξ_k | I_k} to U_k when θ_{k-1} = j. EK[k][j] is the
 * conditional cost-to-go weight E{K_k | θ_{k-1} = j}; EK[K][j] is the
 * terminal weight. P[k][j] is the estimation-error weight of the same stage,
 * kept for diagnostics.
 */
struct GainSchedule {
    int horizon = 0;
    int N = 0;
    std::vector<std::vector<MatrixXd>> L;
    std::vector<std::vector<MatrixXd>> EK;
    std::vector<std::vector<MatrixXd>> P;

    [[nodiscard]] int mode_count() const { return N + 2; }
    /// θ_{-1}: the buffer starts out holding defaults only.
    [[nodiscard]] int initial_mode() const { return N + 1; }
};

GainSchedule backward_recursion(const AugmentedModel& model, const TransitionMatrix& T, const CostWeights& weights);

/// Schedule with every gain set to zero (open-loop default-input baseline).
GainSchedule zero_schedule(const AugmentedModel& model, int horizon);

/// U_k = L[k][theta_prev] · xi_hat.
ControlSequence control_sequence(const GainSchedule& sched, int k, int theta_prev, const VectorXd& xi_hat,
                                 Eigen::Index input_dim);

/// Writes every L and EK matrix as one CSV line:
/// `<prefix>k,mode,L|EK,rows,cols,v0,v1,...` with values row-major.
void dump_gains(std::ostream& os, const GainSchedule& sched, const std::string& prefix = {});

}  // namespace seqlqg
