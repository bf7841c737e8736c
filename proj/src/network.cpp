#include "seqlqg/network.hpp"

#include <algorithm>

namespace seqlqg {

Delay sample_delay(const DelayPmf& pmf, Rng& rng) {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < pmf.probs.size(); ++i) {
        cumulative += pmf.probs[i];
        if (u < cumulative) return Delay::steps(static_cast<int>(i));
    }
    return Delay::lost();
}

std::span<const int> AckChannel::visible(int k) const {
    const auto count = static_cast<std::size_t>(std::clamp(k, 0, static_cast<int>(history_.size())));
    return std::span<const int>(history_).first(count);
}

std::optional<int> AckChannel::latest(int k) const {
    const auto seen = visible(k);
    if (seen.empty() || static_cast<int>(seen.size()) < k) return std::nullopt;
    return seen.back();
}

}  // namespace seqlqg
