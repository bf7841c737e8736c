#include "seqlqg/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "seqlqg/format.hpp"
#include "seqlqg/network.hpp"
#include "seqlqg/random.hpp"

namespace seqlqg {

Scenario make_scenario(const ValidatedConfig& config, int filter_window) {
    Scenario s{config, build_augmented(config.plant, config.weights, config.seq),
               build_transition_matrix(config.ca, config.seq.N), filter_window};
    return s;
}

std::vector<int> EpisodeTrace::thetas() const {
    std::vector<int> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.theta);
    return out;
}

EpisodeTrace run_episode(const Scenario& scenario, const GainSchedule& sched, std::uint64_t seed) {
    const ValidatedConfig& cfg = scenario.config;
    const PlantModel& plant = cfg.plant;
    const int K = scenario.horizon();
    const int N = cfg.seq.N;
    const Eigen::Index m = plant.input_dim();
    if (sched.horizon != K || sched.N != N) throw std::invalid_argument("run_episode: schedule does not match scenario");

    Rng rng_x0 = make_stream(seed, Stream::InitialState);
    Rng rng_w = make_stream(seed, Stream::ProcessNoise);
    Rng rng_v = make_stream(seed, Stream::MeasurementNoise);
    Rng rng_ca = make_stream(seed, Stream::CaDelay);
    Rng rng_sc = make_stream(seed, Stream::ScDelay);

    const MatrixXd sqrt_P0 = psd_sqrt(plant.x0_cov);
    const MatrixXd sqrt_W = psd_sqrt(plant.W);
    const MatrixXd sqrt_V = psd_sqrt(plant.V);

    Transport<ControlSequence> ca_link;
    Transport<VectorXd> sc_link;
    AckChannel acks;
    BufferingActuator actuator(N, cfg.seq.u_default);
    DelayedMeasurementEstimator estimator(plant, scenario.model, cfg.seq.u_default, scenario.filter_window);

    EpisodeTrace trace;
    trace.steps.reserve(K);

    VectorXd x = plant.x0_mean + sample_gaussian(rng_x0, sqrt_P0);
    auto emit_measurement = [&](int k) {
        VectorXd y = plant.C * x + sample_gaussian(rng_v, sqrt_V);
        const Delay delay = sample_delay(cfg.sc, rng_sc);
        sc_link.send({k, delay, y});
        return std::pair{y, delay};
    };
    auto [y0, d0] = emit_measurement(0);
    VectorXd y = std::move(y0);
    Delay sc_delay = d0;

    for (int k = 0; k < K; ++k) {
        StepRecord rec;
        rec.k = k;
        rec.x = x;
        rec.y = y;
        rec.sc_delay = sc_delay;

        // controller
        MeasurementSet Z;
        for (auto& p : sc_link.deliver(k)) {
            rec.sc_arrivals.push_back(p.sent_at);
            Z.push_back({p.sent_at, std::move(p.payload)});
        }
        const std::optional<int> theta_prev = acks.latest(k);
        if (theta_prev) estimator.ingest_ack(*theta_prev);
        estimator.ingest_measurements(k, Z);
        rec.xi_hat = estimator.augmented_estimate(k);
        rec.estimation_error = x - rec.xi_hat.head(plant.state_dim());
        ControlSequence U = control_sequence(sched, k, theta_prev.value_or(sched.initial_mode()), rec.xi_hat, m);
        estimator.record_sent(U);
        rec.U = U.stacked;
        rec.ca_delay = sample_delay(cfg.ca, rng_ca);
        ca_link.send({k, rec.ca_delay, std::move(U)});

        // actuator
        std::vector<ControlSequence> arrivals;
        for (auto& p : ca_link.deliver(k)) {
            rec.ca_arrivals.push_back(p.sent_at);
            arrivals.push_back(std::move(p.payload));
        }
        actuator.receive(arrivals);
        const Actuation act = actuator.actuate(k);
        acks.publish(act.theta);
        rec.u = act.u;
        rec.theta = act.theta;
        rec.stage_cost = stage_cost(x, act.u, cfg.weights);
        trace.total_cost += rec.stage_cost;

        // plant and sensor
        x = plant.A * x + plant.B * act.u + sample_gaussian(rng_w, sqrt_W);
        std::tie(y, sc_delay) = emit_measurement(k + 1);
        trace.steps.push_back(std::move(rec));
    }

    trace.x_terminal = x;
    trace.terminal_cost = terminal_cost(x, cfg.weights);
    trace.total_cost += trace.terminal_cost;
    return trace;
}

McSummary summarize(std::vector<double> costs) {
    McSummary s;
    s.runs = static_cast<int>(costs.size());
    if (s.runs == 0) throw std::invalid_argument("summarize: no runs");
    double sum = 0.0;
    for (double c : costs) sum += c;
    s.mean_cost = sum / s.runs;
    if (s.runs > 1) {
        double ss = 0.0;
        for (double c : costs) ss += (c - s.mean_cost) * (c - s.mean_cost);
        s.std_error = std::sqrt(ss / (s.runs - 1) / s.runs);
    }
    s.costs = std::move(costs);
    return s;
}

McSummary monte_carlo(const Scenario& scenario, const GainSchedule& sched, int runs, std::uint64_t base_seed,
                      unsigned threads) {
    if (runs < 1) throw std::invalid_argument("monte_carlo: runs must be at least 1");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(runs));

    std::vector<double> costs(runs);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < runs; i = next++) {
            try {
                costs[i] = run_episode(scenario, sched, base_seed + static_cast<std::uint64_t>(i)).total_cost;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return summarize(std::move(costs));
}

namespace {

struct MomentWalk {
    const Scenario& scenario;
    const GainSchedule& gains;
    MatrixXd noise;  // blockdiag(W, 0)

    double expand(int k, int prev_mode, const VectorXd& mean, const MatrixXd& cov) const {
        const AugmentedModel& M = scenario.model;
        if (k == gains.horizon) {
            return mean.dot(M.Q_tilde_terminal * mean) + (M.Q_tilde_terminal * cov).trace();
        }
        const MatrixXd& L = gains.L[k][prev_mode];
        double total = 0.0;
        for (int i = 0; i < M.mode_count(); ++i) {
            const double p = scenario.T(prev_mode, i);
            if (p == 0.0) continue;
            const ModeMatrices& mode = M.modes[i];
            const MatrixXd weight = mode.Q_tilde + L.transpose() * mode.R_tilde * L;
            const double stage = mean.dot(weight * mean) + (weight * cov).trace();
            const MatrixXd closed = mode.A_tilde + mode.B_tilde * L;
            const VectorXd next_mean = closed * mean;
            const MatrixXd next_cov = closed * cov * closed.transpose() + noise;
            total += p * (stage + expand(k + 1, i, next_mean, next_cov));
        }
        return total;
    }
};

}  // namespace

double exact_expected_cost(const Scenario& scenario, const GainSchedule& gains) {
    const AugmentedModel& M = scenario.model;
    if (gains.N != M.N) throw std::invalid_argument("exact_expected_cost: gains do not match scenario");
    double paths = 1.0;
    for (int k = 0; k < gains.horizon; ++k) paths *= M.mode_count();
    if (paths > static_cast<double>(kMaxModePaths)) {
        throw std::length_error("exact_expected_cost: instance too large for mode-path enumeration");
    }

    const PlantModel& plant = scenario.config.plant;
    VectorXd mean(M.xi_dim());
    mean << plant.x0_mean, M.initial_eta(scenario.config.seq.u_default);
    MatrixXd cov = MatrixXd::Zero(M.xi_dim(), M.xi_dim());
    cov.topLeftCorner(M.n, M.n) = plant.x0_cov;
    MatrixXd noise = MatrixXd::Zero(M.xi_dim(), M.xi_dim());
    noise.topLeftCorner(M.n, M.n) = plant.W;

    const MomentWalk walk{scenario, gains, noise};
    return walk.expand(0, gains.initial_mode(), mean, cov);
}

std::vector<int> simulate_buffer_ages(const DelayPmf& ca, int N, int steps, std::uint64_t seed) {
    validate_pmf(ca, "network.ca");
    Rng rng = make_stream(seed, Stream::CaDelay);
    Transport<ControlSequence> link;
    BufferingActuator actuator(N, VectorXd::Zero(1));
    std::vector<int> thetas;
    thetas.reserve(steps);
    for (int k = 0; k < steps; ++k) {
        link.send({k, sample_delay(ca, rng), ControlSequence{k, VectorXd::Zero(N + 1), 1}});
        std::vector<ControlSequence> arrivals;
        for (auto& p : link.deliver(k)) arrivals.push_back(std::move(p.payload));
        actuator.receive(arrivals);
        thetas.push_back(actuator.actuate(k).theta);
    }
    return thetas;
}

MatrixXd empirical_theta_frequencies(const std::vector<std::vector<int>>& paths, int modes, long min_transitions) {
    MatrixXd counts = MatrixXd::Zero(modes, modes);
    long total = 0;
    for (const auto& path : paths) {
        for (std::size_t t = 1; t < path.size(); ++t) {
            const int from = path[t - 1];
            const int to = path[t];
            if (from < 0 || from >= modes || to < 0 || to >= modes) {
                throw std::out_of_range("empirical_theta_frequencies: mode out of range");
            }
            counts(from, to) += 1.0;
            ++total;
        }
    }
    if (total < min_transitions) {
        throw std::invalid_argument("empirical_theta_frequencies: insufficient data (" + std::to_string(total) +
                                    " transitions)");
    }
    for (int i = 0; i < modes; ++i) {
        const double row = counts.row(i).sum();
        if (row > 0.0) counts.row(i) /= row;
    }
    return counts;
}

namespace {

std::string join_origins(const std::vector<int>& origins) {
    std::string out;
    for (std::size_t i = 0; i < origins.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(origins[i]);
    }
    return out;
}

}  // namespace

void write_trace_csv(std::ostream& os, const EpisodeTrace& trace, bool with_header,
                     const std::string& header_prefix, const std::string& row_prefix) {
    const Eigen::Index n = trace.x_terminal.size();
    const Eigen::Index m = trace.steps.empty() ? 0 : trace.steps.front().u.size();
    if (with_header) {
        os << header_prefix << "k";
        for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i;
        for (Eigen::Index i = 0; i < m; ++i) os << ",u" << i;
        os << ",theta,stage_cost,ca_arrivals,sc_arrivals\n";
    }
    for (const StepRecord& s : trace.steps) {
        os << row_prefix << s.k;
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(s.x[i]);
        for (Eigen::Index i = 0; i < m; ++i) os << ',' << format_double(s.u[i]);
        os << ',' << s.theta << ',' << format_double(s.stage_cost) << ',' << join_origins(s.ca_arrivals) << ','
           << join_origins(s.sc_arrivals) << '\n';
    }
    os << row_prefix << trace.steps.size();
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << format_double(trace.x_terminal[i]);
    for (Eigen::Index i = 0; i < m; ++i) os << ',';
    os << ",," << format_double(trace.terminal_cost) << ",,\n";
}

}  // namespace seqlqg
