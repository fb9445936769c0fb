#pragma once

#include <string>

#include "ltv/experiment.hpp"

// JSON run configuration for the CLI. Schema (all sections optional — defaults
// are the desk run: the myopic-trap preset, 10^4 users, 42 periods, 30 seeds):
//
// {
//   "preset": "myopic_trap" | "flat",     // built-in environments
//   "env": {                              // overrides preset; full spec if none
//     "n_states": 6, "n_users": 10000, "seed": 1,
//     "items": [{"item_id": 1, "bidder_id": 1, "bid": 2.0,
//                "conv_prob": [...],
//                "drift": [[...], ...] | {"ladder": {"up": false, "p": 0.85}}}],
//     "norec_drift": [[...], ...] | {"ladder": ...},
//     "interaction_prob": [...] | 0.6,    // scalar broadcasts over states
//     "init_state_prob": [...],
//     "mask": [[...], ...],               // [s][a] 0/1; default: all eligible
//     "avail_prob": 0.8, "arrival_prob": 0.0, "init_present_frac": 1.0
//   },
//   "trainer": {"batch_size": 32, "c": 0.5, "k0": 1000, "gamma": 0.8,
//               "target_sync_k": 100, "buffer_capacity": 1000000, "seed": 1},
//   "experiment": {"alpha": 0.96, "tune_cap": 0.0, "n_seeds": 30,
//                  "n_periods": 42, "split": 0.4, "h": 15,
//                  "steps_per_period": 300, "week_len": 7,
//                  "data_regime": "base" | "mod"}
// }

namespace ltv {

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);  // throws bad-config
ExperimentConfig default_config();

}  // namespace ltv
