#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "seqlqg/controller.hpp"

using namespace seqlqg;

namespace {

struct Problem {
    Benchmark bench;
    AugmentedModel model;
    TransitionMatrix T;
    GainSchedule sched;
};

Problem benchmark_setup(int N, const DelayPmf& ca, int K) {
    Problem s{double_integrator_benchmark(), {}, {}, {}};
    s.bench.seq.N = N;
    s.bench.weights.horizon = K;
    s.model = build_augmented(s.bench.plant, s.bench.weights, s.bench.seq);
    s.T = build_transition_matrix(ca, N);
    s.sched = backward_recursion(s.model, s.T, s.bench.weights);
    return s;
}

double rel_diff(const MatrixXd& a, const MatrixXd& b) {
    return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST(Pseudoinverse, Identity) {
    EXPECT_TRUE(pseudoinverse(MatrixXd::Identity(4, 4)).isApprox(MatrixXd::Identity(4, 4), 1e-15));
}

TEST(Pseudoinverse, SingularDiagonal) {
    const MatrixXd M = (MatrixXd(2, 2) << 2, 0, 0, 0).finished();
    const MatrixXd expected = (MatrixXd(2, 2) << 0.5, 0, 0, 0).finished();
    EXPECT_LT((pseudoinverse(M) - expected).norm(), 1e-15);
    EXPECT_TRUE(pseudoinverse(MatrixXd::Zero(3, 3)).isZero());
}

TEST(Pseudoinverse, PenroseIdentitiesOnRandomPsd) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int dim = 1 + trial % 6;
        const int rank = 1 + (trial / 6) % dim;
        const MatrixXd M = oracle::random_psd(rng, dim, rank);
        const MatrixXd X = pseudoinverse(M);
        const double scale = std::max(1.0, M.norm());
        EXPECT_LT((M * X * M - M).norm(), 1e-8 * scale);
        EXPECT_LT((X * M * X - X).norm(), 1e-8 * std::max(1.0, X.norm()));
        EXPECT_LT(((M * X).transpose() - M * X).norm(), 1e-8);
        EXPECT_LT(((X * M).transpose() - X * M).norm(), 1e-8);
    }
}

TEST(Pseudoinverse, RejectsAsymmetricAndNonSquare) {
    EXPECT_THROW(pseudoinverse((MatrixXd(2, 2) << 1, 2, 0, 1).finished()), std::invalid_argument);
    EXPECT_THROW(pseudoinverse(MatrixXd::Identity(2, 3)), std::invalid_argument);
}

TEST(BackwardRecursion, PerfectLinkReducesToLqr) {
    constexpr int K = 40;
    const Problem s = benchmark_setup(0, DelayPmf{{1.0}, 0.0}, K);
    const auto& P = s.bench.plant;
    const auto& W = s.bench.weights;
    const auto lqr = oracle::finite_horizon_lqr(P.A, P.B, W.Q, W.R, W.Q_terminal, K);
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < 2; ++j) {
            const MatrixXd& L = s.sched.L[k][j];
            EXPECT_LT((L.leftCols(2) - lqr.L[k]).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, lqr.L[k].norm()));
            EXPECT_LT(L.rightCols(1).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(BackwardRecursion, PerfectLinkCostMatchesClassicalForLongerSequences) {
    constexpr int K = 20;
    for (int N : {0, 1, 3}) {
        const Problem s = benchmark_setup(N, DelayPmf{{1.0}, 0.0}, K);
        const auto& P = s.bench.plant;
        const auto& W = s.bench.weights;
        const auto lqr = oracle::finite_horizon_lqr(P.A, P.B, W.Q, W.R, W.Q_terminal, K);
        for (int k = 0; k <= K; ++k) {
            const MatrixXd& EK = s.sched.EK[k][0];
            EXPECT_LT(rel_diff(EK.topLeftCorner(2, 2), lqr.P[k]), 1e-10) << "N=" << N << " k=" << k;
            if (k < K) {
                EXPECT_LT((s.sched.L[k][0].topLeftCorner(1, 2) - lqr.L[k]).norm(), 1e-9 * lqr.L[k].norm());
            }
        }
    }
}

TEST(BackwardRecursion, SingleStepHandValue) {
    const Problem s = benchmark_setup(0, DelayPmf{{0.5}, 0.5}, 1);
    const MatrixXd expected = (MatrixXd(1, 3) << 0.0, -0.5, 0.0).finished();
    for (int j = 0; j < 2; ++j) EXPECT_LT((s.sched.L[0][j] - expected).norm(), 1e-14) << s.sched.L[0][j];
}

TEST(BackwardRecursion, EntriesPastHorizonGetZeroGain) {
    constexpr int K = 10;
    const Problem s = benchmark_setup(2, DelayPmf{{0.5, 0.3}, 0.2}, K);
    for (int j = 0; j < s.sched.mode_count(); ++j) {
        const MatrixXd& L = s.sched.L[K - 1][j];
        EXPECT_LT(L.bottomRows(2).cwiseAbs().maxCoeff(), 1e-12) << L;
        EXPECT_GT(L.row(0).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_LT(s.sched.L[K - 2][j].bottomRows(1).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(BackwardRecursion, CostToGoConvergesBackwards) {
    constexpr int K = 80;
    const Problem s = benchmark_setup(1, DelayPmf{{0.5, 0.3}, 0.2}, K);
    // The u^d slot is uncontrollable and charged whenever the default is
    // applied, so its diagonal entry grows by a fixed amount per step instead.
    const Eigen::Index last = s.model.xi_dim() - 1;
    for (int k = 0; k + 2 <= K - 30; ++k) {
        for (int j = 0; j < 3; ++j) {
            MatrixXd a = s.sched.EK[k][j];
            MatrixXd b = s.sched.EK[k + 1][j];
            const MatrixXd& c = s.sched.EK[k + 2][j];
            const double step_now = a(last, last) - b(last, last);
            const double step_next = b(last, last) - c(last, last);
            EXPECT_GT(step_now, 0.0);
            EXPECT_NEAR(step_now, step_next, 1e-6 * step_now);
            a(last, last) = 0.0;
            b(last, last) = 0.0;
            for (Eigen::Index r = 0; r <= last; ++r) {
                for (Eigen::Index col = 0; col <= last; ++col) {
                    EXPECT_NEAR(a(r, col), b(r, col), 1e-6 * std::max(1.0, std::abs(b(r, col))))
                        << "k=" << k << " mode " << j << " entry " << r << "," << col;
                }
            }
        }
    }
}

TEST(BackwardRecursion, CostToGoSymmetricPsdProperty) {
    const DelayPmf pmfs[] = {{{0.5, 0.3}, 0.2}, {{0.05, 0.1, 0.15, 0.2}, 0.5}, {{}, 1.0}};
    for (const auto& pmf : pmfs) {
        for (int N = 0; N <= 3; ++N) {
            const Problem s = benchmark_setup(N, pmf, 15);
            for (int k = 0; k <= 15; ++k) {
                for (int j = 0; j < s.sched.mode_count(); ++j) {
                    const MatrixXd& EK = s.sched.EK[k][j];
                    ASSERT_EQ(EK, EK.transpose());
                    Eigen::SelfAdjointEigenSolver<MatrixXd> es(EK);
                    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * std::max(1.0, es.eigenvalues().maxCoeff()));
                }
            }
        }
    }
}

TEST(ControlSequence, LinearInEstimate) {
    const Problem s = benchmark_setup(2, DelayPmf{{0.5, 0.3}, 0.2}, 10);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    const auto d = s.model.xi_dim();
    for (int trial = 0; trial < 20; ++trial) {
        const VectorXd a = VectorXd::NullaryExpr(d, [&] { return normal(rng); });
        const VectorXd b = VectorXd::NullaryExpr(d, [&] { return normal(rng); });
        const double alpha = normal(rng);
        const double beta = normal(rng);
        const int k = trial % 10;
        const int j = trial % 4;
        const VectorXd lhs = control_sequence(s.sched, k, j, alpha * a + beta * b, 1).stacked;
        const VectorXd rhs = alpha * control_sequence(s.sched, k, j, a, 1).stacked +
                             beta * control_sequence(s.sched, k, j, b, 1).stacked;
        EXPECT_LT((lhs - rhs).norm(), 1e-10 * std::max(1.0, rhs.norm()));
    }
}

TEST(ControlSequence, RejectsOutOfRange) {
    const Problem s = benchmark_setup(1, DelayPmf{{0.5, 0.3}, 0.2}, 5);
    const VectorXd xi = VectorXd::Zero(s.model.xi_dim());
    EXPECT_THROW(control_sequence(s.sched, 5, 0, xi, 1), std::out_of_range);
    EXPECT_THROW(control_sequence(s.sched, -1, 0, xi, 1), std::out_of_range);
    EXPECT_THROW(control_sequence(s.sched, 0, 3, xi, 1), std::out_of_range);
    const ControlSequence U = control_sequence(s.sched, 4, 2, xi, 1);
    EXPECT_EQ(U.origin, 4);
    EXPECT_EQ(U.length(), 2);
}

TEST(DumpGains, OneLinePerMatrix) {
    const Problem s = benchmark_setup(1, DelayPmf{{0.5, 0.3}, 0.2}, 3);
    std::ostringstream os;
    dump_gains(os, s.sched, "net,1,");
    std::istringstream lines(os.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        EXPECT_EQ(line.rfind("net,1,", 0), 0u);
        ++count;
    }
    EXPECT_EQ(count, 3 * 3 + 4 * 3);
}
