#include "ltv/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ltv {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("bad-config: " + what);
}

std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where + " must be an array");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) fail(where + " must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// [s][s'] matrix, or {"ladder": {"up": bool, "p": stay-put mass}} shorthand
std::vector<double> kernel(const json& j, int n_states, const std::string& where) {
    if (j.is_object() && j.contains("ladder")) {
        const auto& l = j["ladder"];
        return ladder_kernel(n_states, l.value("up", true), l.value("p", 0.85));
    }
    if (!j.is_array() || static_cast<int>(j.size()) != n_states)
        fail(where + " must be an SxS matrix or a ladder shorthand");
    std::vector<double> out;
    for (const auto& row : j) {
        auto r = number_list(row, where + " row");
        if (static_cast<int>(r.size()) != n_states) fail(where + " row length");
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

void apply_env(const json& j, TabularEnvConfig& env, bool have_preset) {
    if (j.contains("n_states")) env.n_states = j["n_states"].get<int>();
    if (env.n_states < 1) fail("env.n_states");
    if (j.contains("n_users")) env.n_users = j["n_users"].get<int>();
    if (j.contains("seed")) env.seed = j["seed"].get<uint64_t>();
    if (j.contains("avail_prob")) env.avail_prob = j["avail_prob"].get<double>();
    if (j.contains("arrival_prob")) env.arrival_prob = j["arrival_prob"].get<double>();
    if (j.contains("init_present_frac"))
        env.init_present_frac = j["init_present_frac"].get<double>();

    if (j.contains("interaction_prob")) {
        const auto& p = j["interaction_prob"];
        env.interaction_prob = p.is_number()
                                   ? std::vector<double>(env.n_states, p.get<double>())
                                   : number_list(p, "env.interaction_prob");
    }
    if (j.contains("init_state_prob"))
        env.init_state_prob = number_list(j["init_state_prob"], "env.init_state_prob");
    if (j.contains("norec_drift"))
        env.norec_drift = kernel(j["norec_drift"], env.n_states, "env.norec_drift");

    if (j.contains("items")) {
        env.items.clear();
        for (const auto& it : j["items"]) {
            ItemSpec spec;
            spec.item_id = it.value("item_id", static_cast<int>(env.items.size()) + 1);
            spec.bidder_id = it.value("bidder_id", spec.item_id);
            spec.bid = it.value("bid", 1.0);
            if (!it.contains("conv_prob")) fail("items[].conv_prob required");
            spec.conv_prob = number_list(it["conv_prob"], "items[].conv_prob");
            if (!it.contains("drift")) fail("items[].drift required");
            spec.drift = kernel(it["drift"], env.n_states, "items[].drift");
            env.items.push_back(std::move(spec));
        }
    } else if (!have_preset) {
        fail("env.items required without a preset");
    }

    if (j.contains("mask")) {
        const auto& m = j["mask"];
        if (!m.is_array() || static_cast<int>(m.size()) != env.n_states) fail("env.mask shape");
        env.static_mask.assign(static_cast<size_t>(env.n_states) * env.n_actions(), 0);
        for (int s = 0; s < env.n_states; ++s) {
            auto row = number_list(m[s], "env.mask row");
            if (static_cast<int>(row.size()) != env.n_actions()) fail("env.mask row length");
            for (int a = 0; a < env.n_actions(); ++a)
                env.static_mask[static_cast<size_t>(s) * env.n_actions() + a] = row[a] != 0.0;
        }
    } else if (!have_preset || j.contains("items")) {
        env.static_mask = full_mask(env.n_states, env.n_actions());
    }
}

}  // namespace

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.env = myopic_trap_config();
    cfg.trainer.seed = 1;
    return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(e.what());
    }
    if (!j.is_object()) fail("top level must be an object");

    ExperimentConfig cfg = default_config();
    bool have_preset = true;
    if (j.contains("preset")) {
        const std::string p = j["preset"].get<std::string>();
        const int users = j.contains("env") ? j["env"].value("n_users", 10000) : 10000;
        const uint64_t seed = j.contains("env") ? j["env"].value("seed", uint64_t{1}) : 1;
        if (p == "myopic_trap")
            cfg.env = myopic_trap_config(users, seed);
        else if (p == "flat")
            cfg.env = flat_config(users, seed);
        else
            fail("unknown preset " + p);
    } else if (j.contains("env")) {
        cfg.env = TabularEnvConfig{};
        have_preset = false;
    }
    if (j.contains("env")) apply_env(j["env"], cfg.env, have_preset);

    if (j.contains("trainer")) {
        const auto& t = j["trainer"];
        cfg.trainer.batch_size = t.value("batch_size", cfg.trainer.batch_size);
        cfg.trainer.step.c = t.value("c", cfg.trainer.step.c);
        cfg.trainer.step.k0 = t.value("k0", cfg.trainer.step.k0);
        cfg.trainer.gamma = t.value("gamma", cfg.trainer.gamma);
        cfg.trainer.target_sync_k = t.value("target_sync_k", cfg.trainer.target_sync_k);
        cfg.trainer.buffer_capacity = t.value("buffer_capacity", cfg.trainer.buffer_capacity);
        cfg.trainer.seed = t.value("seed", cfg.trainer.seed);
        cfg.trainer.total_steps = t.value("total_steps", cfg.trainer.total_steps);
    }

    if (j.contains("experiment")) {
        const auto& e = j["experiment"];
        cfg.alpha = e.value("alpha", cfg.alpha);
        cfg.tune_cap = e.value("tune_cap", cfg.tune_cap);
        cfg.n_seeds = e.value("n_seeds", cfg.n_seeds);
        cfg.n_periods = e.value("n_periods", cfg.n_periods);
        cfg.split = e.value("split", cfg.split);
        cfg.h = e.value("h", cfg.h);
        cfg.steps_per_period = e.value("steps_per_period", cfg.steps_per_period);
        cfg.week_len = e.value("week_len", cfg.week_len);
        if (e.contains("data_regime")) {
            const std::string r = e["data_regime"].get<std::string>();
            if (r == "base")
                cfg.data_regime = DataRegime::kBase;
            else if (r == "mod")
                cfg.data_regime = DataRegime::kMod;
            else
                fail("experiment.data_regime must be base|mod");
        }
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace ltv
