#include "seqlqg/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "seqlqg/controller.hpp"
#include "seqlqg/format.hpp"
#include "seqlqg/sim.hpp"

namespace seqlqg {

DelayPmf network_fixture(const std::string& name) {
    if (name == "A-like") {
        // mostly undelayed, rare losses
        return DelayPmf{{0.55, 0.20, 0.10, 0.05, 0.03, 0.02}, 0.05};
    }
    if (name == "B-like") {
        // broad delay spread, a quarter of all packets lost
        return DelayPmf{{0.05, 0.10, 0.15, 0.15, 0.12, 0.08, 0.05, 0.03, 0.02}, 0.25};
    }
    throw ConfigError("network.fixture", "unknown network fixture '" + name + "'");
}

std::vector<std::string> network_fixture_names() { return {"A-like", "B-like"}; }

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

void reject_unknown_keys(const YAML::Node& map, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!map.IsMap()) throw ConfigParseError("section '" + section + "' must be a mapping", line_of(map));
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigParseError("unknown key '" + section + "." + key + "'", line_of(kv.first));
        }
    }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) throw ConfigParseError(field + ": expected a scalar", line_of(node));
    try {
        return node.as<T>();
    } catch (const YAML::BadConversion&) {
        throw ConfigParseError(field + ": cannot read value '" + node.Scalar() + "'", line_of(node));
    }
}

VectorXd vector_of(const YAML::Node& node, const std::string& field) {
    if (node.IsScalar()) return VectorXd::Constant(1, scalar<double>(node, field));
    if (!node.IsSequence()) throw ConfigParseError(field + ": expected a list of numbers", line_of(node));
    VectorXd v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) v[static_cast<Eigen::Index>(i)] = scalar<double>(node[i], field);
    return v;
}

/// A scalar (1x1) or a list of equally long rows.
MatrixXd matrix_of(const YAML::Node& node, const std::string& field) {
    if (node.IsScalar()) return MatrixXd::Constant(1, 1, scalar<double>(node, field));
    if (!node.IsSequence() || node.size() == 0) {
        throw ConfigParseError(field + ": expected a list of rows", line_of(node));
    }
    const auto rows = static_cast<Eigen::Index>(node.size());
    Eigen::Index cols = -1;
    MatrixXd M;
    for (std::size_t r = 0; r < node.size(); ++r) {
        const VectorXd row = vector_of(node[r], field);
        if (cols < 0) {
            cols = row.size();
            M.resize(rows, cols);
        } else if (row.size() != cols) {
            throw ConfigParseError(field + ": rows have different lengths", line_of(node[r]));
        }
        M.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return M;
}

DelayPmf pmf_of(const YAML::Node& node, const std::string& field) {
    reject_unknown_keys(node, field, {"probs", "loss", "fixture"});
    if (node["fixture"]) {
        if (node["probs"] || node["loss"]) {
            throw ConfigParseError(field + ": give either a fixture or probs/loss", line_of(node));
        }
        return network_fixture(scalar<std::string>(node["fixture"], field + ".fixture"));
    }
    if (!node["probs"]) throw ConfigParseError(field + ": missing required key 'probs'", line_of(node));
    DelayPmf pmf;
    const VectorXd probs = vector_of(node["probs"], field + ".probs");
    pmf.probs.assign(probs.data(), probs.data() + probs.size());
    if (node["loss"]) pmf.loss = scalar<double>(node["loss"], field + ".loss");
    return pmf;
}

NetworkSpec network_of(const YAML::Node& node) {
    reject_unknown_keys(node, "network", {"name", "fixture", "ca", "sc"});
    NetworkSpec net;
    bool have_ca = false;
    if (node["fixture"]) {
        const auto fixture = scalar<std::string>(node["fixture"], "network.fixture");
        net.name = fixture;
        net.ca = net.sc = network_fixture(fixture);
        have_ca = true;
    }
    if (node["ca"]) {
        net.ca = pmf_of(node["ca"], "network.ca");
        if (!node["sc"] && !node["fixture"]) net.sc = net.ca;
        have_ca = true;
    }
    if (node["sc"]) net.sc = pmf_of(node["sc"], "network.sc");
    if (!have_ca) throw ConfigParseError("network: need 'fixture' or 'ca'", line_of(node));
    if (node["name"]) net.name = scalar<std::string>(node["name"], "network.name");
    if (net.name.empty()) throw ConfigParseError("network: missing required key 'name'", line_of(node));
    if (net.name.find_first_of(",\n\r\"") != std::string::npos) {
        throw ConfigParseError("network.name: must not contain commas, quotes or line breaks", line_of(node));
    }
    return net;
}

ExperimentConfig from_yaml(const YAML::Node& root) {
    if (!root || root.IsNull()) throw ConfigParseError("missing required section: plant");
    reject_unknown_keys(root, "config", {"plant", "cost", "network", "experiment"});
    for (const char* section : {"plant", "network", "experiment"}) {
        if (!root[section]) throw ConfigParseError(std::string("missing required section: ") + section);
    }

    ExperimentConfig cfg;

    const YAML::Node plant = root["plant"];
    reject_unknown_keys(plant, "plant", {"benchmark", "A", "B", "C", "W", "V", "x0_mean", "x0_cov"});
    const bool benchmark = static_cast<bool>(plant["benchmark"]);
    std::optional<int> default_horizon;
    if (benchmark) {
        const auto name = scalar<std::string>(plant["benchmark"], "plant.benchmark");
        if (name != "double_integrator") {
            throw ConfigParseError("plant.benchmark: unknown benchmark '" + name + "'", line_of(plant["benchmark"]));
        }
        const Benchmark b = double_integrator_benchmark();
        cfg.plant = b.plant;
        cfg.weights = b.weights;
        cfg.u_default = b.seq.u_default;
        default_horizon = b.weights.horizon;
    }
    auto plant_matrix = [&](const char* key, MatrixXd& target) {
        if (plant[key]) {
            target = matrix_of(plant[key], std::string("plant.") + key);
        } else if (!benchmark) {
            throw ConfigParseError(std::string("plant: missing required key '") + key + "'", line_of(plant));
        }
    };
    plant_matrix("A", cfg.plant.A);
    plant_matrix("B", cfg.plant.B);
    plant_matrix("C", cfg.plant.C);
    plant_matrix("W", cfg.plant.W);
    plant_matrix("V", cfg.plant.V);
    plant_matrix("x0_cov", cfg.plant.x0_cov);
    if (plant["x0_mean"]) {
        cfg.plant.x0_mean = vector_of(plant["x0_mean"], "plant.x0_mean");
    } else if (!benchmark) {
        throw ConfigParseError("plant: missing required key 'x0_mean'", line_of(plant));
    }

    if (const YAML::Node cost = root["cost"]) {
        reject_unknown_keys(cost, "cost", {"Q", "R", "Q_terminal"});
        if (cost["Q"]) cfg.weights.Q = matrix_of(cost["Q"], "cost.Q");
        if (cost["R"]) cfg.weights.R = matrix_of(cost["R"], "cost.R");
        if (cost["Q_terminal"]) {
            cfg.weights.Q_terminal = matrix_of(cost["Q_terminal"], "cost.Q_terminal");
        } else if (!benchmark) {
            cfg.weights.Q_terminal = cfg.weights.Q;
        }
    }
    if (!benchmark && (cfg.weights.Q.size() == 0 || cfg.weights.R.size() == 0)) {
        throw ConfigParseError("missing required section: cost (Q and R)");
    }

    const YAML::Node network = root["network"];
    if (network.IsSequence()) {
        for (const auto& item : network) cfg.networks.push_back(network_of(item));
    } else {
        cfg.networks.push_back(network_of(network));
    }
    if (cfg.networks.empty()) throw ConfigParseError("network: at least one network is required", line_of(network));
    std::set<std::string> names;
    for (const auto& net : cfg.networks) {
        if (!names.insert(net.name).second) {
            throw ConfigParseError("network: duplicate network name '" + net.name + "'", line_of(network));
        }
    }

    const YAML::Node exp = root["experiment"];
    reject_unknown_keys(exp, "experiment", {"N", "horizon", "runs", "seed", "filter_window", "u_default", "output"});
    if (!exp["N"]) throw ConfigParseError("experiment: missing required key 'N'", line_of(exp));
    const YAML::Node Ns = exp["N"];
    if (Ns.IsScalar()) {
        cfg.sequence_lengths.push_back(scalar<int>(Ns, "experiment.N"));
    } else if (Ns.IsSequence()) {
        for (const auto& v : Ns) cfg.sequence_lengths.push_back(scalar<int>(v, "experiment.N"));
    } else {
        throw ConfigParseError("experiment.N: expected an integer or a list", line_of(Ns));
    }
    if (cfg.sequence_lengths.empty()) throw ConfigParseError("experiment.N: sweep list is empty", line_of(Ns));

    if (exp["horizon"]) {
        cfg.weights.horizon = scalar<int>(exp["horizon"], "experiment.horizon");
    } else if (default_horizon) {
        cfg.weights.horizon = *default_horizon;
    } else {
        throw ConfigParseError("experiment: missing required key 'horizon'", line_of(exp));
    }
    if (exp["runs"]) cfg.runs = scalar<int>(exp["runs"], "experiment.runs");
    if (cfg.runs < 1) throw ConfigParseError("experiment.runs: must be at least 1", line_of(exp["runs"]));
    if (exp["seed"]) cfg.base_seed = scalar<std::uint64_t>(exp["seed"], "experiment.seed");
    if (exp["filter_window"]) cfg.filter_window = scalar<int>(exp["filter_window"], "experiment.filter_window");
    if (cfg.filter_window < 0) {
        throw ConfigParseError("experiment.filter_window: must be nonnegative", line_of(exp["filter_window"]));
    }
    if (exp["u_default"]) {
        cfg.u_default = vector_of(exp["u_default"], "experiment.u_default");
    } else if (!benchmark) {
        cfg.u_default = VectorXd::Zero(cfg.plant.B.cols());
    }
    if (exp["output"]) cfg.output = scalar<std::string>(exp["output"], "experiment.output");

    for (const auto& net : cfg.networks) {
        for (int N : cfg.sequence_lengths) validate(cfg.plant, cfg.weights, net.ca, net.sc, SequenceConfig{N, cfg.u_default});
    }
    return cfg;
}

}  // namespace

ExperimentConfig parse_config_string(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigParseError(e.msg, e.mark.line + 1);
    }
    return from_yaml(root);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigParseError("cannot open configuration file '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_string(text.str());
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const SweepOutputs& outputs) {
    std::vector<SweepRow> rows;
    bool first_cell = true;
    if (outputs.gains) *outputs.gains << "network,N,k,mode,kind,rows,cols,values\n";
    for (const NetworkSpec& net : config.networks) {
        for (int N : config.sequence_lengths) {
            const ValidatedConfig vc =
                validate(config.plant, config.weights, net.ca, net.sc, SequenceConfig{N, config.u_default});
            const Scenario scenario = make_scenario(vc, config.filter_window);
            const GainSchedule sched = backward_recursion(scenario.model, scenario.T, vc.weights);
            const std::string prefix = net.name + "," + std::to_string(N) + ",";

            if (outputs.gains) dump_gains(*outputs.gains, sched, prefix);
            if (outputs.trace) {
                write_trace_csv(*outputs.trace, run_episode(scenario, sched, config.base_seed), first_cell, "network,N,",
                                prefix);
            }
            first_cell = false;

            const McSummary mc = monte_carlo(scenario, sched, config.runs, config.base_seed, outputs.threads);
            rows.push_back({net.name, N, mc.runs, vc.weights.horizon, mc.mean_cost, mc.std_error, config.base_seed});
        }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepCsvHeader << '\n';
    for (const SweepRow& r : rows) {
        os << r.network << ',' << r.N << ',' << r.runs << ',' << r.K << ',' << format_double(r.mean_cost) << ','
           << format_double(r.std_error) << ',' << r.seed << '\n';
    }
}

namespace {

template <typename T>
T parse_field(const std::string& text, int line) {
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ConfigParseError("malformed CSV field '" + text + "'", line);
    }
    return value;
}

}  // namespace

std::vector<SweepRow> parse_sweep_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kSweepCsvHeader) throw ConfigParseError("unexpected CSV header", 1);
    std::vector<SweepRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 7) throw ConfigParseError("expected 7 CSV fields", line_no);
        rows.push_back({f[0], parse_field<int>(f[1], line_no), parse_field<int>(f[2], line_no),
                        parse_field<int>(f[3], line_no), parse_field<double>(f[4], line_no),
                        parse_field<double>(f[5], line_no), parse_field<std::uint64_t>(f[6], line_no)});
    }
    return rows;
}

}  // namespace seqlqg
