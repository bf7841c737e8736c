#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "seqlqg/controller.hpp"
#include "seqlqg/estimator.hpp"
#include "seqlqg/mjls.hpp"
#include "seqlqg/model.hpp"

namespace seqlqg {

/// Everything a closed-loop episode needs besides the gains and the seed.
struct Scenario {
    ValidatedConfig config;
    AugmentedModel model;
    TransitionMatrix T;
    int filter_window = kDefaultFilterWindow;

    [[nodiscard]] int horizon() const { return config.weights.horizon; }
};

Scenario make_scenario(const ValidatedConfig& config, int filter_window = kDefaultFilterWindow);

struct StepRecord {
    int k = 0;
    VectorXd x;                    // true plant state x_k
    VectorXd y;                    // measurement y_k as emitted by the sensor
    VectorXd xi_hat;               // E{ξ_k | I_k} used by the controller
    VectorXd estimation_error;     // x_k - E{x_k | I_k}; the η part is known exactly
    VectorXd U;                    // stacked sequence sent at k
    Delay ca_delay = Delay::lost();  // delay drawn for U_k
    Delay sc_delay = Delay::lost();  // delay drawn for y_k
    std::vector<int> ca_arrivals;  // origins of sequences delivered to the actuator at k
    std::vector<int> sc_arrivals;  // origins of measurements delivered to the controller at k
    VectorXd u;                    // applied input
    int theta = 0;
    double stage_cost = 0.0;
};

struct EpisodeTrace {
    std::vector<StepRecord> steps;
    VectorXd x_terminal;
    double terminal_cost = 0.0;
    double total_cost = 0.0;

    [[nodiscard]] std::vector<int> thetas() const;
};

/// Runs one closed-loop episode. Fully determined by (scenario, sched, seed).
EpisodeTrace run_episode(const Scenario& scenario, const GainSchedule& sched, std::uint64_t seed);

struct McSummary {
    int runs = 0;
    double mean_cost = 0.0;
    double std_error = 0.0;
    std::vector<double> costs;  // indexed by run
};

/// Mean and standard error of the mean (sample standard deviation / √n).
McSummary summarize(std::vector<double> costs);

/// Runs episodes with seeds base_seed, base_seed+1, ... on up to `threads`
/// workers (0 = hardware concurrency). The result does not depend on the
/// number of workers.
McSummary monte_carlo(const Scenario& scenario, const GainSchedule& sched, int runs, std::uint64_t base_seed,
                      unsigned threads = 0);

inline constexpr long kMaxModePaths = 100000;

/**
 * Expected cost of the full-information loop U_k = L[k][θ_{k-1}] ξ_k,
 * computed by enumerating every mode path θ_0..θ_{K-1} and propagating the
 * first two moments of ξ along it. Throws std::length_error if there are more
 * than kMaxModePaths paths.
 */
double exact_expected_cost(const Scenario& scenario, const GainSchedule& gains);

/// Buffer ages θ_0..θ_{steps-1} of an actuator fed one sequence per step over
/// a link with the given delay PMF.
std::vector<int> simulate_buffer_ages(const DelayPmf& ca, int N, int steps, std::uint64_t seed);

/// Row-normalized transition counts over all consecutive pairs in `paths`.
/// Throws std::invalid_argument below `min_transitions` observed transitions.
MatrixXd empirical_theta_frequencies(const std::vector<std::vector<int>>& paths, int modes,
                                     long min_transitions = 10000);

/// One CSV row per step: k, x components, u components, theta, stage_cost,
/// ca_arrivals, sc_arrivals (arrival origins joined by ';'), followed by a
/// terminal row with k = K. `row_prefix` is prepended verbatim to every data
/// row and `header_prefix` to the header line.
void write_trace_csv(std::ostream& os, const EpisodeTrace& trace, bool with_header = true,
                     const std::string& header_prefix = {}, const std::string& row_prefix = {});

}  // namespace seqlqg
