// Monte-Carlo sweeps of the sequence-based LQG controller over sequence
// lengths and network models.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "seqlqg/experiment.hpp"

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequence-based LQG control over lossy, delaying networks: Monte-Carlo sweeps"};

    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::string gains_path;
    std::string trace_path;
    unsigned threads = 0;

    app.add_option("--config", config_path, "Experiment configuration (YAML)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "Result CSV (overrides experiment.output; default: stdout)");
    app.add_option("--seed", seed, "Base seed (overrides experiment.seed)");
    app.add_option("--dump-gains", gains_path, "Write every gain schedule as CSV, one matrix per line");
    app.add_option("--trace", trace_path, "Write the trace of the first run of every cell as CSV");
    app.add_option("--threads", threads, "Worker threads for Monte-Carlo runs (0: all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        seqlqg::ExperimentConfig config = seqlqg::parse_config(config_path);
        if (seed) config.base_seed = *seed;
        if (!out_path.empty()) config.output = out_path;

        std::optional<std::ofstream> gains_file;
        std::optional<std::ofstream> trace_file;
        seqlqg::SweepOutputs outputs;
        outputs.threads = threads;
        if (!gains_path.empty()) outputs.gains = &gains_file.emplace(open_output(gains_path));
        if (!trace_path.empty()) outputs.trace = &trace_file.emplace(open_output(trace_path));

        const auto rows = seqlqg::run_sweep(config, outputs);

        if (config.output.empty()) {
            seqlqg::write_sweep_csv(std::cout, rows);
        } else {
            std::ofstream out = open_output(config.output);
            seqlqg::write_sweep_csv(out, rows);
            if (!out) throw std::runtime_error("failed writing '" + config.output + "'");
        }
    } catch (const std::exception& e) {
        std::cerr << "seqlqg: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
