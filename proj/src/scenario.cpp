#include "difloc/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace difloc {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + v);
    }
    if (pos != v.size())
        throw std::invalid_argument("config: trailing characters in value for '" + key + "': " + v);
    return x;
}

long parse_long(const std::string& v, const std::string& key) {
    const double x = parse_double(v, key);
    return static_cast<long>(x);
}

}  // namespace

const char* to_string(Strategy s) {
    return s == Strategy::collaborative ? "collab" : "noncollab";
}
const char* to_string(Channel c) { return c == Channel::ideal ? "ideal" : "noisy"; }
const char* to_string(CountModel m) {
    switch (m) {
        case CountModel::auto_select: return "auto";
        case CountModel::binomial: return "binomial";
        case CountModel::gaussian: return "gaussian";
    }
    return "?";
}
const char* to_string(NoiseMode n) { return n == NoiseMode::stochastic ? "stochastic" : "zero"; }
const char* to_string(AbnormalityPrior p) {
    return p == AbnormalityPrior::indicator_points ? "ip" : "area";
}

void ScenarioConfig::validate() const {
    arena.validate();
    diff.validate();
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (L < 2) throw std::invalid_argument("config: L must be >= 2");
}

TrialPlan ScenarioConfig::to_plan() const {
    TrialPlan plan;
    plan.arena = arena;
    plan.diff = diff;
    plan.strategy = strategy;
    plan.channel = channel;
    plan.L = L;
    plan.trials = trials;
    plan.seed = seed;
    plan.model = model;
    plan.noise = noise;
    plan.prior = prior;
    plan.use_sensor_walk = use_sensor_walk;
    if (use_sensor_walk) plan.sensors = default_sensor_params(arena, diff);
    plan.threads = threads;
    return plan;
}

std::string ScenarioConfig::descriptor() const {
    std::ostringstream os;
    os << to_string(strategy) << "/" << to_string(channel) << " L=" << L
       << " NthM=" << diff.released_per_type;
    return os.str();
}

namespace {

std::string format_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string ScenarioConfig::to_key_values() const {
    std::map<std::string, std::string> kv;
    kv["w"] = format_number(arena.side);
    kv["dFG"] = format_number(arena.gateway_distance);
    kv["D"] = format_number(diff.diff_molecule);
    kv["D2"] = format_number(diff.diff_marker);
    kv["VF"] = format_number(diff.volume_fc);
    kv["VG"] = format_number(diff.volume_gateway);
    kv["K"] = std::to_string(diff.samples_per_fc);
    kv["NthM"] = format_number(diff.released_per_type);
    kv["alpha"] = format_number(diff.amplification);
    kv["strategy"] = to_string(strategy);
    kv["channel"] = to_string(channel);
    kv["L"] = std::to_string(L);
    kv["trials"] = std::to_string(trials);
    kv["seed"] = std::to_string(seed);
    kv["model"] = to_string(model);
    kv["noise"] = to_string(noise);
    kv["prior"] = to_string(prior);
    kv["sensor_walk"] = use_sensor_walk ? "1" : "0";
    kv["threads"] = std::to_string(threads);

    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "w")
        cfg.arena.side = parse_double(v, key);
    else if (key == "dFG")
        cfg.arena.gateway_distance = parse_double(v, key);
    else if (key == "D")
        cfg.diff.diff_molecule = parse_double(v, key);
    else if (key == "D2")
        cfg.diff.diff_marker = parse_double(v, key);
    else if (key == "VF")
        cfg.diff.volume_fc = parse_double(v, key);
    else if (key == "VG")
        cfg.diff.volume_gateway = parse_double(v, key);
    else if (key == "K")
        cfg.diff.samples_per_fc = static_cast<int>(parse_long(v, key));
    else if (key == "NthM")
        cfg.diff.released_per_type = parse_double(v, key);
    else if (key == "alpha")
        cfg.diff.amplification = parse_double(v, key);
    else if (key == "strategy") {
        if (v == "collab")
            cfg.strategy = Strategy::collaborative;
        else if (v == "noncollab")
            cfg.strategy = Strategy::noncollaborative;
        else
            throw std::invalid_argument("config: strategy must be collab or noncollab");
    } else if (key == "channel") {
        if (v == "ideal")
            cfg.channel = Channel::ideal;
        else if (v == "noisy")
            cfg.channel = Channel::noisy;
        else
            throw std::invalid_argument("config: channel must be ideal or noisy");
    } else if (key == "L")
        cfg.L = static_cast<int>(parse_long(v, key));
    else if (key == "trials")
        cfg.trials = parse_long(v, key);
    else if (key == "seed")
        cfg.seed = static_cast<std::uint64_t>(parse_long(v, key));
    else if (key == "model") {
        if (v == "auto")
            cfg.model = CountModel::auto_select;
        else if (v == "binomial")
            cfg.model = CountModel::binomial;
        else if (v == "gaussian")
            cfg.model = CountModel::gaussian;
        else
            throw std::invalid_argument("config: model must be auto, binomial or gaussian");
    } else if (key == "noise") {
        if (v == "stochastic")
            cfg.noise = NoiseMode::stochastic;
        else if (v == "zero")
            cfg.noise = NoiseMode::zero;
        else
            throw std::invalid_argument("config: noise must be stochastic or zero");
    } else if (key == "prior") {
        if (v == "ip")
            cfg.prior = AbnormalityPrior::indicator_points;
        else if (v == "area")
            cfg.prior = AbnormalityPrior::uniform_area;
        else
            throw std::invalid_argument("config: prior must be ip or area");
    } else if (key == "sensor_walk")
        cfg.use_sensor_walk = parse_long(v, key) != 0;
    else if (key == "threads")
        cfg.threads = static_cast<int>(parse_long(v, key));
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        " is not 'key = value': " + line);
        apply_override(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    return parse_config(in);
}

}  // namespace difloc
