#pragma once

#include <map>
#include <vector>

#include "seqlqg/actuator.hpp"
#include "seqlqg/mjls.hpp"
#include "seqlqg/network.hpp"

namespace seqlqg {

inline constexpr int kDefaultFilterWindow = 12;

struct GaussianMoments {
    VectorXd mean;
    MatrixXd cov;
};

/// Standard Kalman time update.
GaussianMoments kalman_predict(const GaussianMoments& prior, const PlantModel& plant, const VectorXd& u);
/// Kalman measurement update in Joseph form.
GaussianMoments kalman_update(const GaussianMoments& predicted, const PlantModel& plant, const VectorXd& y);

/**
 * Conditional mean of the augmented state ξ_k = [x_k; η_k].
 *
 * The plant part is a Kalman filter that keeps the measurements received
 * within the last `filter_window` steps. Whenever a measurement arrives late,
 * the filter is re-run from that measurement's sampling step up to the
 * current one. The η part is known exactly from the sent sequences.
 *
 * Per controller step k the expected call order is
 * ingest_ack(θ_{k-1}) (k ≥ 1), ingest_measurements(k, Z_k),
 * augmented_estimate(k), record_sent(U_k).
 */
class DelayedMeasurementEstimator {
public:
    DelayedMeasurementEstimator(PlantModel plant, const AugmentedModel& model, VectorXd u_default,
                                int filter_window = kDefaultFilterWindow);

    /// Stores U_k and advances η_{k+1} = F η_k + G U_k. U.origin must be the
    /// next unrecorded step.
    void record_sent(const ControlSequence& U);

    /// Reconstructs the input applied at the previous step from its buffer age.
    void ingest_ack(int theta_prev);

    /// Buffers Z_k and brings the posterior up to step k. Arrivals at k = 0
    /// and arrivals older than the window are dropped.
    void ingest_measurements(int k, const MeasurementSet& arrivals);

    /// E{ξ_k | I_k} = [E{x_k | I_k}; η_k].
    [[nodiscard]] VectorXd augmented_estimate(int k) const;

    [[nodiscard]] int current_step() const { return static_cast<int>(posterior_.size()) - 1; }
    [[nodiscard]] const VectorXd& x_mean() const { return posterior_.back().mean; }
    [[nodiscard]] const MatrixXd& x_cov() const { return posterior_.back().cov; }
    [[nodiscard]] const std::vector<VectorXd>& eta_history() const { return eta_; }
    [[nodiscard]] const std::vector<VectorXd>& applied_inputs() const { return applied_; }
    [[nodiscard]] const std::map<int, VectorXd>& buffered_measurements() const { return buffer_; }
    [[nodiscard]] int filter_window() const { return window_; }

private:
    void replay_from(int first);

    PlantModel plant_;
    MatrixXd F_;
    MatrixXd G_;
    int N_;
    VectorXd u_default_;
    int window_;

    std::vector<ControlSequence> sent_;
    std::vector<VectorXd> eta_;
    std::vector<VectorXd> applied_;
    std::map<int, VectorXd> buffer_;
    std::vector<GaussianMoments> posterior_;
};

}  // namespace seqlqg
