#include "signgad/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace signgad {

DetectorConfig RunConfig::detector_config() const {
    DetectorConfig cfg;
    cfg.logistic.l2 = linear_l2;
    cfg.tree.rounds = tree_rounds;
    cfg.tree.max_depth = tree_depth;
    cfg.tree.learning_rate = tree_lr;
    cfg.tree.min_samples_leaf = tree_min_leaf;
    cfg.tree.leaf_lambda = tree_leaf_lambda;
    cfg.q_dim = q_dim;
    cfg.epsilon = epsilon;
    return cfg;
}

void RunConfig::validate() const {
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
        throw std::invalid_argument("config: train_ratio must be in (0, 1)");
    }
    if (n_workflows < 1) {
        throw std::invalid_argument("config: n_workflows must be >= 1");
    }
    if (alpha < 0.0 || alpha > 1.0) {
        throw std::invalid_argument("config: alpha must be in [0, 1]");
    }
    if (planner != "rule" && planner != "llm") {
        throw std::invalid_argument("config: planner must be 'rule' or 'llm'");
    }
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
        throw std::invalid_argument("config: val_fraction must be in (0, 1)");
    }
    if (!(refit_split > 0.0 && refit_split < 1.0)) {
        throw std::invalid_argument("config: refit_split must be in (0, 1)");
    }
    if (workers < 1) {
        throw std::invalid_argument("config: workers must be >= 1");
    }
}

namespace {

bool parse_bool(const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: bad boolean value: " + value);
}

} // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dataset_dir") cfg.dataset_dir = value;
    else if (key == "task_text_file") cfg.task_text_file = value;
    else if (key == "task_text") cfg.task_text = value;
    else if (key == "train_ratio") cfg.train_ratio = std::stod(value);
    else if (key == "val_fraction") cfg.val_fraction = std::stod(value);
    else if (key == "n_workflows") cfg.n_workflows = std::stoul(value);
    else if (key == "alpha") cfg.alpha = std::stod(value);
    else if (key == "planner") cfg.planner = value;
    else if (key == "llm_endpoint") cfg.llm_endpoint = value;
    else if (key == "llm_model") cfg.llm_model = value;
    else if (key == "llm_timeout_s") cfg.llm_timeout_s = std::stod(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "workers") cfg.workers = std::stoul(value);
    else if (key == "q_dim") cfg.q_dim = std::stoul(value);
    else if (key == "svd_rank") cfg.svd_rank = std::stoul(value);
    else if (key == "tree_rounds") cfg.tree_rounds = std::stoul(value);
    else if (key == "tree_depth") cfg.tree_depth = std::stoul(value);
    else if (key == "tree_lr") cfg.tree_lr = std::stod(value);
    else if (key == "tree_min_leaf") cfg.tree_min_leaf = std::stoul(value);
    else if (key == "tree_leaf_lambda") cfg.tree_leaf_lambda = std::stod(value);
    else if (key == "linear_l2") cfg.linear_l2 = std::stod(value);
    else if (key == "refit_split") cfg.refit_split = std::stod(value);
    else if (key == "epsilon") cfg.epsilon = std::stod(value);
    else if (key == "refit_enabled") cfg.refit_enabled = parse_bool(value);
    else if (key == "search_enabled") cfg.search_enabled = parse_bool(value);
    else if (key == "bank_enabled") cfg.bank_enabled = parse_bool(value);
    else if (key == "force_k") cfg.force_k = std::stoi(value);
    else if (key == "synth_nodes") cfg.synth.n_nodes = std::stoul(value);
    else if (key == "synth_features") cfg.synth.feature_dim = std::stoul(value);
    else if (key == "synth_anomaly_rate") cfg.synth.anomaly_rate = std::stod(value);
    else if (key == "synth_extra_relations") cfg.synth.n_extra_relations = std::stoul(value);
    else if (key == "synth_homophily") cfg.synth.homophily = std::stod(value);
    else if (key == "synth_shift") cfg.synth.anomaly_shift = std::stod(value);
    else if (key == "synth_rewire") cfg.synth.anomaly_rewire = std::stod(value);
    else throw std::invalid_argument("config: unknown key: " + key);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("config: cannot open " + path);
    }
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t comment = line.find('#');
        if (comment != std::string::npos) {
            line = line.substr(0, comment);
        }
        const auto strip = [](std::string s) {
            const std::size_t a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) {
                return std::string{};
            }
            const std::size_t b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: missing '=' at " + path + ":" +
                                     std::to_string(lineno));
        }
        apply_config_entry(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }

    if (!cfg.task_text_file.empty() && cfg.task_text.empty()) {
        std::ifstream task(cfg.task_text_file);
        if (!task) {
            throw std::runtime_error("config: cannot open task_text_file " + cfg.task_text_file);
        }
        std::ostringstream text;
        text << task.rdbuf();
        cfg.task_text = text.str();
    }
    return cfg;
}

} // namespace signgad
