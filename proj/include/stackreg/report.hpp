#pragma once
// Serialization of run, ablation and de-duplication results.

#include <string>
#include <vector>

#include "json.hpp"
#include "stackreg/pipeline.hpp"

namespace stackreg {

inline constexpr int kReportSchemaVersion = 1;

/// The structured report. Contains no wall-clock data, so identical inputs
/// and configuration give identical documents.
nlohmann::json report_to_json(const RunReport& rep);
/// Aligned-text comparison table with selection and blend summaries.
std::string report_to_text(const RunReport& rep);

std::string selection_log_csv(const SelectionResult& sel);
std::string fold_traces_csv(const RunReport& rep);
std::string blend_weights_csv(const RunReport& rep);
std::string regularization_path_csv(const RunReport& rep);
std::string error_bins_csv(const std::vector<ErrorBin>& bins);
nlohmann::json timings_to_json(const RunReport& rep);

nlohmann::json ablation_to_json(const std::vector<AblationRow>& rows, const PipelineConfig& cfg);
std::string ablation_to_text(const std::vector<AblationRow>& rows);
std::string ablation_csv(const std::vector<AblationRow>& rows);

nlohmann::json selection_to_json(const SelectionResult& sel,
                                 const std::vector<std::string>& variance_pruned);

}  // namespace stackreg
