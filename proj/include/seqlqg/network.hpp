#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "seqlqg/model.hpp"
#include "seqlqg/random.hpp"

namespace seqlqg {

/// Transmission delay of one packet in whole steps, or "lost".
class Delay {
public:
    static constexpr Delay steps(int k) { return Delay(k); }
    static constexpr Delay lost() { return Delay(); }

    [[nodiscard]] constexpr bool is_lost() const { return steps_ < 0; }
    /// Only meaningful when !is_lost().
    [[nodiscard]] constexpr int value() const { return steps_; }

    friend constexpr bool operator==(Delay, Delay) = default;

private:
    constexpr Delay() = default;
    constexpr explicit Delay(int k) : steps_(k) {}
    int steps_ = -1;
};

/// Draws one packet delay. Consumes exactly one uniform variate.
Delay sample_delay(const DelayPmf& pmf, Rng& rng);

template <typename Payload>
struct Packet {
    int sent_at = 0;
    Delay delay = Delay::lost();
    Payload payload;
};

/// One received measurement y_m, tagged with its sampling step m.
struct Measurement {
    int origin = 0;
    VectorXd y;
};

/// Z_k: everything the sensor-to-controller link delivered at one step.
using MeasurementSet = std::vector<Measurement>;

/**
 * Unidirectional packet link. Each packet carries the delay sampled when it
 * was sent; it is handed out exactly at step sent_at + delay. Lost packets
 * are never delivered. Packets due at the same step come out in send order.
 */
template <typename Payload>
class Transport {
public:
    void send(Packet<Payload> packet) {
        if (packet.delay.is_lost()) {
            ++lost_;
            return;
        }
        const int due = packet.sent_at + packet.delay.value();
        queue_.emplace(due, std::move(packet));
    }

    /// Payloads due at step `now`. Steps must be visited in increasing order;
    /// anything still queued for an earlier step is discarded.
    std::vector<Packet<Payload>> deliver(int now) {
        queue_.erase(queue_.begin(), queue_.lower_bound(now));
        std::vector<Packet<Payload>> out;
        auto [first, last] = queue_.equal_range(now);
        for (auto it = first; it != last; ++it) out.push_back(std::move(it->second));
        queue_.erase(first, last);
        return out;
    }

    [[nodiscard]] std::size_t in_flight() const { return queue_.size(); }
    [[nodiscard]] std::size_t lost() const { return lost_; }

private:
    // multimap keeps insertion order among equal keys
    std::multimap<int, Packet<Payload>> queue_;
    std::size_t lost_ = 0;
};

/**
 * Same-step acknowledgement channel. The actuator publishes θ_k once per
 * step; at controller step k only θ_0..θ_{k-1} are visible.
 */
class AckChannel {
public:
    void publish(int theta) { history_.push_back(theta); }

    [[nodiscard]] std::span<const int> visible(int k) const;
    /// θ_{k-1}, or nothing at k = 0.
    [[nodiscard]] std::optional<int> latest(int k) const;

private:
    std::vector<int> history_;
};

}  // namespace seqlqg
