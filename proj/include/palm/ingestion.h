#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "palm/types.h"

namespace palm::ingestion {

enum class RejectKind { malformed_row, out_of_range, unknown_course, unknown_letter, duplicate };

const char* to_string(RejectKind k);

struct Reject {
  std::size_t line = 0;  // 1-based line in the source file
  RejectKind kind = RejectKind::malformed_row;
  std::string message;
};

/// Result of a row-oriented CSV parse. accepted + rejects.size() always
/// equals the number of data rows in the input.
template <typename Record>
struct CsvResult {
  std::vector<Record> records;
  std::vector<Reject> rejects;

  std::size_t row_count() const { return records.size() + rejects.size(); }

  /// True if any reject other than an unknown course id was produced.
  bool has_validation_errors() const {
    for (const auto& r : rejects)
      if (r.kind != RejectKind::unknown_course) return true;
    return false;
  }
};

/// Splits one CSV document (UTF-8, comma separated, `\n` line ends, header
/// first). Double-quoted fields with `""` escapes are accepted. A trailing
/// `\r` is stripped from each line. Blank lines are ignored.
struct CsvTable {
  std::vector<std::string> header;
  struct Row {
    std::size_t line = 0;
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;
};

CsvTable read_csv(std::string_view bytes);

CurriculumLayout parse_layout(std::string_view bytes);
/// Canonical serialization; parse_layout(serialize_layout(x)) == x and
/// serialize_layout(parse_layout(s)) == s for canonical s.
std::string serialize_layout(const CurriculumLayout& layout);

/// Known course ids come from the layout; rows naming other courses are
/// rejected as unknown_course. An optional `max_score` column turns raw
/// quiz scores into fractions.
CsvResult<EngagementRecord> parse_engagement_csv(std::string_view bytes,
                                                 const std::set<std::string>& known_courses);
std::string serialize_engagement_csv(const std::vector<EngagementRecord>& records);

GradeScale parse_grade_scale(std::string_view bytes);
std::string serialize_grade_scale(const GradeScale& scale);

CsvResult<GradeRecord> parse_grades_csv(std::string_view bytes, const GradeScale& scale,
                                        const std::set<std::string>& known_courses);
std::string serialize_grades_csv(const std::vector<GradeRecord>& records);

struct SurveyParseResult {
  CsvResult<SurveyResponseSet> result;
  /// Respondents seen in only one phase. They are kept in `records`; the
  /// statistics layer excludes them from pairing.
  std::vector<std::string> unpaired;
};

SurveyParseResult parse_survey_csv(std::string_view bytes, const InstrumentDefinition& instrument);
std::string serialize_survey_csv(const std::vector<SurveyResponseSet>& responses,
                                 const InstrumentDefinition& instrument);

/// Instrument JSON: `{instrument_id, likert_min?, likert_max?, factors:[{name, items:[...]}]}`.
InstrumentDefinition parse_instrument(std::string_view bytes);

std::set<std::string> course_ids(const CurriculumLayout& layout);

}  // namespace palm::ingestion
