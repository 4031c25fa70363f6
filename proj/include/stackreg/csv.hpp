#pragma once
// Prediction CSV files: header "id[,target],model_1,...,model_K", one row per sample.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stackreg/core.hpp"

namespace stackreg {

struct PredictionsFile {
    std::vector<std::string> ids;
    std::optional<std::vector<double>> target;
    PredictionMatrix predictions;
};

enum class TargetColumn { Required, Forbidden, Optional };

/// Throws Parse for malformed content (with line numbers), Parse with
/// "target column required" when a required target is missing, and Selection
/// when no model columns are present.
PredictionsFile read_predictions_csv(std::istream& in, TargetColumn target_rule,
                                     const std::string& source = "<stream>");
PredictionsFile read_predictions_csv(const std::string& path, TargetColumn target_rule);

/// Numbers are written in shortest round-trip form, so reading back is value-identical.
void write_predictions_csv(std::ostream& out, const PredictionsFile& file);
void write_predictions_csv(const std::string& path, const PredictionsFile& file);

/// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

/// Quotes a CSV field if it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

}  // namespace stackreg
