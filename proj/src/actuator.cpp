#include "seqlqg/actuator.hpp"

#include <stdexcept>

namespace seqlqg {

BufferingActuator::BufferingActuator(int N, VectorXd u_default)
    : N_(N), u_default_(std::move(u_default)), last_theta_(N + 1) {
    if (N < 0) throw std::invalid_argument("BufferingActuator: N must be nonnegative");
}

void BufferingActuator::receive(std::span<const ControlSequence> arrivals) {
    for (const auto& seq : arrivals) {
        if (seq.length() != N_ + 1 || seq.input_dim != u_default_.size()) {
            throw std::invalid_argument("BufferingActuator: sequence has wrong shape");
        }
        if (!held_ || seq.origin > held_->origin) held_ = seq;
    }
}

Actuation BufferingActuator::actuate(int k) {
    Actuation out;
    out.theta = N_ + 1;
    if (held_) {
        const int age = k - held_->origin;
        if (age >= 0 && age <= N_) out.theta = age;
    }
    out.u = out.theta <= N_ ? held_->entry(out.theta) : u_default_;
    last_theta_ = out.theta;
    return out;
}

}  // namespace seqlqg
