#pragma once

// JSON documents for verification runs and solve summaries.

#include "skam/action.hpp"
#include "skam/group.hpp"
#include "skam/operator_norm.hpp"
#include "skam/solver.hpp"

#include <json.hpp>

namespace skam {

nlohmann::json to_json(const GroupLawReport& r);
nlohmann::json to_json(const AcReport& r);
nlohmann::json to_json(const BoundedOperatorEstimate& e);
nlohmann::json to_json(const ActionConstants& k);
nlohmann::json to_json(const CertificateReport& r);
nlohmann::json to_json(std::span<const ScalePair> grid);

/// Status, residual, constants and per-certificate minimum margins.
nlohmann::json summary_json(const SolveResult& r, const SolveConfig& cfg);

}  // namespace skam
