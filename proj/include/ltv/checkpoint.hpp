#pragma once

#include <string>

#include "ltv/qfunction.hpp"

// Versioned JSON dumps of estimator parameters (live + target copies) with
// shape metadata. Loaders validate version, kind, and shape before touching
// any weights and throw bad-checkpoint otherwise.

namespace ltv {

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const TabularQ& q, const std::string& path);
void save_checkpoint(const MlpQ& q, const std::string& path);

// "tabular" | "mlp"; throws bad-checkpoint on anything unreadable
std::string checkpoint_kind(const std::string& path);

TabularQ load_tabular_checkpoint(const std::string& path);
MlpQ load_mlp_checkpoint(const std::string& path);

}  // namespace ltv
