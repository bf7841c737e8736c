#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqlqg/model.hpp"

namespace seqlqg {

/// Malformed or incomplete configuration file. `line()` is 1-based, or 0
/// when the problem has no single location.
class ConfigParseError : public std::runtime_error {
public:
    ConfigParseError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

struct NetworkSpec {
    std::string name;
    DelayPmf ca;
    DelayPmf sc;
};

/**
 * Reconstructed delay distributions of the two comparison networks. Both are
 * hand-made stand-ins shaped after a fast, reliable network ("A-like") and a
 * slow, lossy one ("B-like"); they are not measured data.
 */
DelayPmf network_fixture(const std::string& name);
std::vector<std::string> network_fixture_names();

struct ExperimentConfig {
    PlantModel plant;
    CostWeights weights;  // weights.horizon is the episode length K
    VectorXd u_default;
    std::vector<NetworkSpec> networks;
    std::vector<int> sequence_lengths;
    int runs = 500;
    std::uint64_t base_seed = 1;
    int filter_window = 12;
    std::string output;  // empty: standard output
};

ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_string(const std::string& text);

struct SweepRow {
    std::string network;
    int N = 0;
    int runs = 0;
    int K = 0;
    double mean_cost = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

struct SweepOutputs {
    std::ostream* gains = nullptr;  // gain schedule dump, one matrix per line
    std::ostream* trace = nullptr;  // trace of the first run of every cell
    unsigned threads = 0;
};

/// One row per (network, N) cell, in configuration order.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const SweepOutputs& outputs = {});

inline constexpr const char* kSweepCsvHeader = "network,N,runs,K,mean_cost,std_error,seed";

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> parse_sweep_csv(const std::string& text);

}  // namespace seqlqg
