#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/seed_seq.hpp>
#include <boost/random/uniform_01.hpp>

#include <Eigen/Dense>

namespace seqlqg {

// Boost.Random distributions are specified algorithmically, so a given seed
// produces the same stream with every compiler and standard library.
using Rng = boost::random::mt19937_64;

/// Independent noise sources of one episode.
enum class Stream : std::uint32_t {
    InitialState = 1,
    ProcessNoise = 2,
    MeasurementNoise = 3,
    CaDelay = 4,
    ScDelay = 5,
};

/// Engine for one named substream of an episode seed.
inline Rng make_stream(std::uint64_t seed, Stream stream) {
    boost::random::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

inline double uniform01(Rng& rng) { return boost::random::uniform_01<double>{}(rng); }

/// Draws from N(0, cov) given a square-root factor S with S S^T = cov.
inline Eigen::VectorXd sample_gaussian(Rng& rng, const Eigen::MatrixXd& sqrt_cov) {
    boost::random::normal_distribution<double> normal;
    Eigen::VectorXd z(sqrt_cov.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    return sqrt_cov * z;
}

/// Symmetric square root of a PSD matrix (tolerates singular covariances).
inline Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace seqlqg
