#include "ltv/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ltv {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("bad-checkpoint: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("bad-checkpoint: " + std::string(e.what()));
    }
    if (!j.is_object() || j.value("version", -1) != kCheckpointVersion)
        throw std::runtime_error("bad-checkpoint: unsupported version");
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("io-failure: cannot open " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("io-failure: short write to " + path);
}

std::vector<double> vec_field(const json& j, const char* name, size_t want) {
    if (!j.contains(name) || !j[name].is_array())
        throw std::runtime_error(std::string("bad-checkpoint: missing ") + name);
    auto v = j[name].get<std::vector<double>>();
    if (v.size() != want)
        throw std::runtime_error(std::string("bad-checkpoint: shape mismatch in ") + name);
    return v;
}

}  // namespace

void save_checkpoint(const TabularQ& q, const std::string& path) {
    json j = {{"version", kCheckpointVersion},
              {"kind", "tabular"},
              {"n_states", q.n_states},
              {"n_actions", q.n_actions},
              {"theta", q.theta},
              {"theta_target", q.theta_target}};
    write_json(j, path);
}

void save_checkpoint(const MlpQ& q, const std::string& path) {
    const auto& c = q.config();
    json j = {{"version", kCheckpointVersion},
              {"kind", "mlp"},
              {"input_dim", c.input_dim},
              {"hidden1", c.hidden1},
              {"hidden2", c.hidden2},
              {"theta", q.params()},
              {"theta_target", q.target_params()}};
    write_json(j, path);
}

std::string checkpoint_kind(const std::string& path) {
    const json j = load_json(path);
    const std::string kind = j.value("kind", "");
    if (kind != "tabular" && kind != "mlp")
        throw std::runtime_error("bad-checkpoint: unknown kind");
    return kind;
}

TabularQ load_tabular_checkpoint(const std::string& path) {
    const json j = load_json(path);
    if (j.value("kind", "") != "tabular")
        throw std::runtime_error("bad-checkpoint: not a tabular checkpoint");
    const int s = j.value("n_states", 0), a = j.value("n_actions", 0);
    if (s < 1 || a < 1) throw std::runtime_error("bad-checkpoint: bad table shape");
    TabularQ q(s, a);
    q.theta = vec_field(j, "theta", q.theta.size());
    q.theta_target = vec_field(j, "theta_target", q.theta_target.size());
    return q;
}

MlpQ load_mlp_checkpoint(const std::string& path) {
    const json j = load_json(path);
    if (j.value("kind", "") != "mlp")
        throw std::runtime_error("bad-checkpoint: not an mlp checkpoint");
    MlpConfig cfg;
    cfg.input_dim = j.value("input_dim", 0);
    cfg.hidden1 = j.value("hidden1", 0);
    cfg.hidden2 = j.value("hidden2", 0);
    if (cfg.input_dim < 1 || cfg.hidden1 < 1 || cfg.hidden2 < 1)
        throw std::runtime_error("bad-checkpoint: bad mlp shape");
    MlpQ q(cfg, 0);
    q.params() = vec_field(j, "theta", q.n_params());
    q.target_params() = vec_field(j, "theta_target", q.n_params());
    return q;
}

}  // namespace ltv
