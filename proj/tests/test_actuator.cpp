#include <gtest/gtest.h>

#include <vector>

#include "oracles.hpp"
#include "seqlqg/actuator.hpp"
#include "seqlqg/network.hpp"

using namespace seqlqg;

namespace {

// Scalar sequence whose entry i is 10*origin + i, so every value names its source.
ControlSequence tagged(int origin, int N) {
    ControlSequence U{origin, VectorXd(N + 1), 1};
    for (int i = 0; i <= N; ++i) U.stacked[i] = 10.0 * origin + i;
    return U;
}

}  // namespace

TEST(Actuator, OlderArrivalDoesNotReplaceNewer) {
    BufferingActuator act(2, VectorXd::Zero(1));
    act.receive(tagged(4, 2));
    act.receive(tagged(3, 2));
    ASSERT_TRUE(act.held().has_value());
    EXPECT_EQ(act.held()->origin, 4);
}

TEST(Actuator, FirstArrivalIsStored) {
    BufferingActuator act(1, VectorXd::Zero(1));
    EXPECT_FALSE(act.held().has_value());
    act.receive(tagged(0, 1));
    ASSERT_TRUE(act.held().has_value());
    EXPECT_EQ(act.held()->origin, 0);
}

TEST(Actuator, SimultaneousArrivalsKeepNewest) {
    BufferingActuator act(3, VectorXd::Zero(1));
    const std::vector<ControlSequence> batch{tagged(2, 3), tagged(5, 3)};
    act.receive(batch);
    EXPECT_EQ(act.held()->origin, 5);
    const std::vector<ControlSequence> reversed{tagged(5, 3), tagged(2, 3)};
    BufferingActuator other(3, VectorXd::Zero(1));
    other.receive(reversed);
    EXPECT_EQ(other.held()->origin, 5);
}

TEST(Actuator, AppliesMatchingEntry) {
    BufferingActuator act(2, VectorXd::Constant(1, -1.0));
    act.receive(tagged(7, 2));
    const Actuation now = act.actuate(7);
    EXPECT_EQ(now.theta, 0);
    EXPECT_EQ(now.u[0], 70.0);
    const Actuation later = act.actuate(9);
    EXPECT_EQ(later.theta, 2);
    EXPECT_EQ(later.u[0], 72.0);
}

TEST(Actuator, ExpiredSequenceFallsBackToDefault) {
    BufferingActuator act(1, VectorXd::Constant(1, -1.0));
    const Actuation empty = act.actuate(0);
    EXPECT_EQ(empty.theta, 2);
    EXPECT_EQ(empty.u[0], -1.0);
    act.receive(tagged(3, 1));
    const Actuation expired = act.actuate(5);
    EXPECT_EQ(expired.theta, 2);
    EXPECT_EQ(expired.u[0], -1.0);
    EXPECT_EQ(act.last_theta(), 2);
}

TEST(Actuator, RejectsWrongShape) {
    BufferingActuator act(2, VectorXd::Zero(1));
    EXPECT_THROW(act.receive(tagged(0, 1)), std::invalid_argument);
}

TEST(Actuator, AgeGrowsByAtMostOneProperty) {
    const DelayPmf pmf{{0.2, 0.2, 0.1, 0.1}, 0.4};
    for (int N : {0, 1, 3}) {
        Rng rng = make_stream(31 + N, Stream::CaDelay);
        BufferingActuator act(N, VectorXd::Zero(1));
        Transport<ControlSequence> link;
        int prev = N + 1;
        for (int k = 0; k < 5000; ++k) {
            link.send({k, sample_delay(pmf, rng), tagged(k, N)});
            std::vector<ControlSequence> arrivals;
            for (auto& p : link.deliver(k)) arrivals.push_back(std::move(p.payload));
            act.receive(arrivals);
            const int theta = act.actuate(k).theta;
            ASSERT_GE(theta, 0);
            ASSERT_LE(theta, N + 1);
            ASSERT_LE(theta, std::min(prev + 1, N + 1)) << "k=" << k;
            prev = theta;
        }
    }
}

TEST(Actuator, AgeMatchesDelayOracle) {
    const DelayPmf pmf{{0.3, 0.2, 0.2, 0.1}, 0.2};
    constexpr int N = 2;
    Rng rng = make_stream(5, Stream::CaDelay);
    BufferingActuator act(N, VectorXd::Zero(1));
    Transport<ControlSequence> link;
    std::vector<int> delays;
    for (int k = 0; k < 2000; ++k) {
        const Delay d = sample_delay(pmf, rng);
        delays.push_back(d.is_lost() ? -1 : d.value());
        link.send({k, d, tagged(k, N)});
        std::vector<ControlSequence> arrivals;
        for (auto& p : link.deliver(k)) arrivals.push_back(std::move(p.payload));
        act.receive(arrivals);
        ASSERT_EQ(act.actuate(k).theta, oracle::buffer_age(delays, k, N)) << "k=" << k;
    }
}

TEST(Actuator, TotalLossSaturates) {
    const DelayPmf pmf{{}, 1.0};
    Rng rng = make_stream(1, Stream::CaDelay);
    BufferingActuator act(2, VectorXd::Constant(1, 0.5));
    Transport<ControlSequence> link;
    for (int k = 0; k < 200; ++k) {
        link.send({k, sample_delay(pmf, rng), tagged(k, 2)});
        std::vector<ControlSequence> arrivals;
        for (auto& p : link.deliver(k)) arrivals.push_back(std::move(p.payload));
        act.receive(arrivals);
        const Actuation a = act.actuate(k);
        EXPECT_EQ(a.theta, 3);
        EXPECT_EQ(a.u[0], 0.5);
    }
}
