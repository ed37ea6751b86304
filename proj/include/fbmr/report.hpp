#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "fbmr/constants.hpp"
#include "fbmr/harness.hpp"

namespace fbmr {

enum class OutputFormat { json, csv, table };

OutputFormat output_format_from_string(const std::string& name);

nlohmann::ordered_json report_to_json(const ExperimentReport& report);

/// Header `name,estimate,se,stat,p,pass`; empty cells for absent fields.
void write_report_csv(const ExperimentReport& report, std::ostream& os);

std::string render_report(const ExperimentReport& report, OutputFormat format);

std::string render_constants(const std::vector<ConstantsRow>& rows, OutputFormat format);

/// Writes to a sibling temp file and renames it over `path`. Throws IoError.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

}  // namespace fbmr
