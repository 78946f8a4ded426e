#include "odlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "odlab/errors.hpp"

namespace odlab {

namespace fs = std::filesystem;
using nlohmann::json;

void atomic_write_file(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path temp = target.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + temp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + temp.string());
    }
    fs::rename(temp, target);
}

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

std::string format_hit(const HitTime& hit) {
    return hit ? std::to_string(*hit) : "inf";
}

std::string trials_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "n,k,trial,protocol,consensus_time,winner,tau_plus_gamma,tau_weak,tau_vanish,tau_plus_delta,tau_plus_eta\n";
    const std::string protocol = protocol_name(result.spec.protocol);
    for (const TrialResult& trial : result.trials) {
        out << trial.n << ',' << trial.k << ',' << trial.trial << ',' << protocol << ','
            << format_hit(trial.consensus_time) << ',' << (trial.winner ? std::to_string(*trial.winner) : "-1") << ','
            << format_hit(trial.tau_plus_gamma) << ',' << format_hit(trial.tau_weak) << ','
            << format_hit(trial.tau_vanish) << ',' << format_hit(trial.tau_plus_delta) << ','
            << format_hit(trial.tau_plus_eta) << '\n';
    }
    return out.str();
}

std::string summary_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "n,k,median,q10,q90,success_rate,timeouts\n";
    for (const CellSummary& cell : result.cells) {
        out << cell.n << ',' << cell.k << ',' << format_double(cell.median) << ',' << format_double(cell.q10) << ','
            << format_double(cell.q90) << ',' << format_double(cell.success_rate) << ',' << cell.timeouts << '\n';
    }
    return out.str();
}

namespace {

json thresholds_json(const ThresholdConfig& t) {
    return json{{"c_weak", t.c_weak},           {"c_active", t.c_active},
                {"c_up_alpha", t.c_up_alpha},   {"c_down_alpha", t.c_down_alpha},
                {"c_up_delta", t.c_up_delta},   {"c_down_delta", t.c_down_delta},
                {"c_up_gamma", t.c_up_gamma},   {"c_down_gamma", t.c_down_gamma},
                {"c_up_eta", t.c_up_eta},       {"x_delta", t.x_delta},
                {"x_gamma", t.x_gamma},         {"x_eta", t.x_eta}};
}

ThresholdConfig thresholds_from_json(const json& j) {
    ThresholdConfig t;
    t.c_weak = j.value("c_weak", t.c_weak);
    t.c_active = j.value("c_active", t.c_active);
    t.c_up_alpha = j.value("c_up_alpha", t.c_up_alpha);
    t.c_down_alpha = j.value("c_down_alpha", t.c_down_alpha);
    t.c_up_delta = j.value("c_up_delta", t.c_up_delta);
    t.c_down_delta = j.value("c_down_delta", t.c_down_delta);
    t.c_up_gamma = j.value("c_up_gamma", t.c_up_gamma);
    t.c_down_gamma = j.value("c_down_gamma", t.c_down_gamma);
    t.c_up_eta = j.value("c_up_eta", t.c_up_eta);
    t.x_delta = j.value("x_delta", t.x_delta);
    t.x_gamma = j.value("x_gamma", t.x_gamma);
    t.x_eta = j.value("x_eta", t.x_eta);
    return t;
}

json constants_json(const ExperimentConstants& c) {
    return json{{"plurality_bias_factor", c.plurality_bias_factor},
                {"lower_bound_divisor", c.lower_bound_divisor},
                {"norm_growth_cstar", c.norm_growth_cstar},
                {"norm_growth_horizon", c.norm_growth_horizon},
                {"vanish_window", c.vanish_window},
                {"bias_amp_window", c.bias_amp_window},
                {"bias_amp_cstar", c.bias_amp_cstar}};
}

ExperimentConstants constants_from_json(const json& j) {
    ExperimentConstants c;
    c.plurality_bias_factor = j.value("plurality_bias_factor", c.plurality_bias_factor);
    c.lower_bound_divisor = j.value("lower_bound_divisor", c.lower_bound_divisor);
    c.norm_growth_cstar = j.value("norm_growth_cstar", c.norm_growth_cstar);
    c.norm_growth_horizon = j.value("norm_growth_horizon", c.norm_growth_horizon);
    c.vanish_window = j.value("vanish_window", c.vanish_window);
    c.bias_amp_window = j.value("bias_amp_window", c.bias_amp_window);
    c.bias_amp_cstar = j.value("bias_amp_cstar", c.bias_amp_cstar);
    return c;
}

}  // namespace

std::string spec_json(const ExperimentSpec& spec) {
    json j;
    j["spec_version"] = kSpecVersion;
    j["experiment"] = experiment_name(spec.kind);
    j["protocol"] = protocol_name(spec.protocol);
    j["n_values"] = spec.n_values;
    j["k_values"] = spec.k_values;
    j["init"] = json{{"kind", init_name(spec.init.kind)}, {"bias", spec.init.bias}, {"counts", spec.init.counts}};
    j["trials"] = spec.trials;
    j["max_rounds"] = spec.max_rounds;
    j["seed"] = spec.seed;
    j["thresholds"] = thresholds_json(spec.thresholds);
    if (spec.tracked_pair)
        j["tracked_pair"] = json::array({spec.tracked_pair->first, spec.tracked_pair->second});
    else
        j["tracked_pair"] = nullptr;
    j["constants"] = constants_json(spec.constants);
    j["use_naive_stepper"] = spec.use_naive_stepper;
    j["threads"] = spec.threads;
    return j.dump(2) + "\n";
}

ExperimentSpec parse_spec_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw SpecError(std::string("spec JSON parse error: ") + e.what());
    }
    try {
        ExperimentSpec spec;
        if (j.contains("spec_version") && j["spec_version"].get<int>() != kSpecVersion)
            throw SpecError("unsupported spec_version");
        spec.kind = parse_experiment(j.at("experiment").get<std::string>());
        spec.protocol = parse_protocol(j.at("protocol").get<std::string>());
        spec.n_values = j.at("n_values").get<std::vector<std::int64_t>>();
        spec.k_values = j.at("k_values").get<std::vector<std::int64_t>>();
        if (j.contains("init")) {
            const json& init = j["init"];
            spec.init.kind = parse_init(init.value("kind", std::string("balanced")));
            spec.init.bias = init.value("bias", 0.0);
            spec.init.counts = init.value("counts", std::vector<std::int64_t>{});
        }
        spec.trials = j.value("trials", spec.trials);
        spec.max_rounds = j.value("max_rounds", spec.max_rounds);
        spec.seed = j.value("seed", spec.seed);
        if (j.contains("thresholds")) spec.thresholds = thresholds_from_json(j["thresholds"]);
        if (j.contains("tracked_pair") && !j["tracked_pair"].is_null()) {
            const auto pair = j["tracked_pair"].get<std::vector<int>>();
            if (pair.size() != 2) throw SpecError("tracked_pair must hold two opinion indices");
            spec.tracked_pair = std::make_pair(pair[0], pair[1]);
        }
        if (j.contains("constants")) spec.constants = constants_from_json(j["constants"]);
        spec.use_naive_stepper = j.value("use_naive_stepper", false);
        spec.threads = j.value("threads", 0);
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw SpecError(std::string("spec JSON: ") + e.what());
    }
}

void write_experiment_output(const ExperimentResult& result, const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    atomic_write_file((dir / "trials.csv").string(), trials_csv(result));
    atomic_write_file((dir / "summary.csv").string(), summary_csv(result));
    atomic_write_file((dir / "spec.json").string(), spec_json(result.spec));
}

}  // namespace odlab
