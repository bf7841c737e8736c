#include "seqlqg/estimator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace seqlqg {

GaussianMoments kalman_predict(const GaussianMoments& prior, const PlantModel& plant, const VectorXd& u) {
    GaussianMoments out;
    out.mean = plant.A * prior.mean + plant.B * u;
    out.cov = plant.A * prior.cov * plant.A.transpose() + plant.W;
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

GaussianMoments kalman_update(const GaussianMoments& predicted, const PlantModel& plant, const VectorXd& y) {
    const MatrixXd& C = plant.C;
    const MatrixXd S = C * predicted.cov * C.transpose() + plant.V;
    Eigen::LLT<MatrixXd> llt(0.5 * (S + S.transpose()));
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("kalman_update: innovation covariance not positive definite");
    }
    // K = P Cᵀ S⁻¹
    const MatrixXd gain = llt.solve(C * predicted.cov).transpose();
    const MatrixXd I_KC = MatrixXd::Identity(predicted.cov.rows(), predicted.cov.cols()) - gain * C;

    GaussianMoments out;
    out.mean = predicted.mean + gain * (y - C * predicted.mean);
    out.cov = I_KC * predicted.cov * I_KC.transpose() + gain * plant.V * gain.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

DelayedMeasurementEstimator::DelayedMeasurementEstimator(PlantModel plant, const AugmentedModel& model,
                                                         VectorXd u_default, int filter_window)
    : plant_(std::move(plant)),
      F_(model.F),
      G_(model.G),
      N_(model.N),
      u_default_(std::move(u_default)),
      window_(filter_window) {
    if (filter_window < 0) throw std::invalid_argument("estimator: filter window must be nonnegative");
    eta_.push_back(model.initial_eta(u_default_));
    posterior_.push_back({plant_.x0_mean, plant_.x0_cov});
}

void DelayedMeasurementEstimator::record_sent(const ControlSequence& U) {
    const int expected = static_cast<int>(sent_.size());
    if (U.origin != expected) {
        throw std::logic_error("estimator: sequence for step " + std::to_string(U.origin) +
                               " recorded out of turn (expected step " + std::to_string(expected) + ")");
    }
    if (U.stacked.size() != G_.cols()) throw std::invalid_argument("estimator: sequence has wrong dimension");
    sent_.push_back(U);
    eta_.push_back(F_ * eta_.back() + G_ * U.stacked);
}

void DelayedMeasurementEstimator::ingest_ack(int theta_prev) {
    if (theta_prev < 0 || theta_prev > N_ + 1) throw std::out_of_range("estimator: acknowledged mode out of range");
    const int step = static_cast<int>(applied_.size());
    if (step >= static_cast<int>(sent_.size())) {
        throw std::logic_error("estimator: acknowledgement for a step without a sent sequence");
    }
    if (theta_prev == N_ + 1) {
        applied_.push_back(u_default_);
        return;
    }
    const int origin = step - theta_prev;
    if (origin < 0) throw std::out_of_range("estimator: acknowledged mode refers to a sequence never sent");
    applied_.push_back(sent_[origin].entry(theta_prev));
}

void DelayedMeasurementEstimator::ingest_measurements(int k, const MeasurementSet& arrivals) {
    const int current = current_step();
    if (k == 0 && current == 0) return;
    if (k != current + 1) throw std::logic_error("estimator: steps must be ingested in order");
    if (static_cast<int>(applied_.size()) < k) {
        throw std::logic_error("estimator: input applied at step " + std::to_string(k - 1) + " is unknown");
    }

    int first = k;
    for (const Measurement& z : arrivals) {
        if (z.origin < 0 || z.origin > k) throw std::invalid_argument("estimator: measurement from the future");
        if (k - z.origin > window_) continue;
        buffer_[z.origin] = z.y;
        first = std::min(first, z.origin);
    }
    buffer_.erase(buffer_.begin(), buffer_.lower_bound(k - window_));
    replay_from(first);
}

void DelayedMeasurementEstimator::replay_from(int first) {
    const int k = static_cast<int>(applied_.size());
    posterior_.resize(k + 1);
    for (int t = first; t <= k; ++t) {
        GaussianMoments prior =
            t == 0 ? GaussianMoments{plant_.x0_mean, plant_.x0_cov} : kalman_predict(posterior_[t - 1], plant_, applied_[t - 1]);
        const auto it = buffer_.find(t);
        posterior_[t] = it == buffer_.end() ? std::move(prior) : kalman_update(prior, plant_, it->second);
    }
}

VectorXd DelayedMeasurementEstimator::augmented_estimate(int k) const {
    if (k < 0 || k > current_step() || k >= static_cast<int>(eta_.size())) {
        throw std::out_of_range("estimator: no estimate for step " + std::to_string(k));
    }
    const VectorXd& x = posterior_[k].mean;
    const VectorXd& eta = eta_[k];
    VectorXd xi(x.size() + eta.size());
    xi << x, eta;
    return xi;
}

}  // namespace seqlqg
