#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "palm/config.h"
#include "palm/ingestion.h"
#include "palm/map_composer.h"
#include "palm/stats.h"

namespace palm::service {

/// One problem found while ingesting a batch of files.
struct InputProblem {
  std::string file;      // "layout", "engagement", ...
  std::string location;  // line or JSON path
  std::string kind;
  std::string message;
};

/// Ingestion failed validation; nothing was published.
class IngestRejected : public ValidationError {
 public:
  explicit IngestRejected(std::vector<InputProblem> problems);
  const std::vector<InputProblem>& problems() const { return problems_; }

 private:
  std::vector<InputProblem> problems_;
};

struct IngestInputs {
  std::string layout;
  std::string engagement;  // empty = no engagement data
  std::string grades;      // empty = no grades
  std::optional<std::string> grade_scale;
};

struct ParsedInputs {
  CurriculumLayout layout;
  ingestion::CsvResult<EngagementRecord> engagement;
  ingestion::CsvResult<GradeRecord> grades;
  GradeScale scale;
};

/// Parses and validates a batch. Rows citing unknown courses are skipped and
/// reported; any other problem throws IngestRejected.
ParsedInputs parse_inputs(const IngestInputs& inputs, const std::optional<GradeScale>& fallback_scale);

/// TF-IDF graph + composition for validated inputs.
composer::MapSnapshot compute_snapshot(const ParsedInputs& parsed, const ServiceConfig& config,
                                       std::string created_at = {});

nlohmann::ordered_json ingest_summary(const ParsedInputs& parsed,
                                      const composer::MapSnapshot* snapshot);
nlohmann::ordered_json problems_to_json(const std::vector<InputProblem>& problems);

/// "tpb", "lads" (case-insensitive) or nullopt.
std::optional<InstrumentDefinition> preset_instrument(std::string name);

struct SurveyAnalysis {
  InstrumentDefinition instrument;
  std::vector<stats::TestReport> reports;
  std::vector<std::string> excluded_respondents;
  double alpha_normality = 0.05;
};

/// Parses both survey files and runs the factor-level comparison. Likert or
/// shape violations throw IngestRejected.
SurveyAnalysis analyze_survey(std::string_view pre_csv, std::string_view post_csv,
                              const InstrumentDefinition& instrument, double alpha_normality);

nlohmann::ordered_json to_json(const stats::TestReport& report);
nlohmann::ordered_json to_json(const SurveyAnalysis& analysis);

}  // namespace palm::service
