#pragma once

#include <optional>
#include <span>
#include <vector>

#include "seqlqg/model.hpp"

namespace seqlqg {

/// U_k: the inputs u_{k|k}, ..., u_{k+N|k} generated at step `origin`,
/// stacked into one vector of length m(N+1).
struct ControlSequence {
    int origin = 0;
    VectorXd stacked;
    Eigen::Index input_dim = 1;

    [[nodiscard]] int length() const { return static_cast<int>(stacked.size() / input_dim); }
    /// u_{origin+i|origin}
    [[nodiscard]] VectorXd entry(int i) const { return stacked.segment(i * input_dim, input_dim); }
};

struct Actuation {
    VectorXd u;
    int theta = 0;
};

/**
 * Buffering actuator. Keeps the newest sequence received so far and applies
 * the entry matching the current step. The buffer age θ_k is N+1 when no
 * held sequence covers step k, in which case the default input is applied.
 */
class BufferingActuator {
public:
    BufferingActuator(int N, VectorXd u_default);

    /// Stores the arrival with the largest origin if it is newer than the held
    /// sequence. Older arrivals are discarded.
    void receive(std::span<const ControlSequence> arrivals);
    void receive(const ControlSequence& arrival) { receive(std::span(&arrival, 1)); }

    Actuation actuate(int k);

    [[nodiscard]] const std::optional<ControlSequence>& held() const { return held_; }
    [[nodiscard]] int last_theta() const { return last_theta_; }
    [[nodiscard]] int horizon_length() const { return N_; }

private:
    int N_;
    VectorXd u_default_;
    std::optional<ControlSequence> held_;
    int last_theta_;
};

}  // namespace seqlqg
