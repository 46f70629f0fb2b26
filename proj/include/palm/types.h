#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace palm {

/// One course block on the curriculum map. Position is a grid cell:
/// objective_row on the vertical axis, semester_index on the timeline axis.
struct Course {
  std::string course_id;
  std::string title;
  int semester_index = 0;
  int objective_row = 0;
  double credits = 0.0;
  std::string overview_text;
  std::string lecture_plan_text;

  bool operator==(const Course&) const = default;
};

/// A grid cell that intentionally holds several courses, drawn in `order`.
struct MultiCourseCell {
  int objective_row = 0;
  int semester_index = 0;
  std::vector<std::string> order;

  bool operator==(const MultiCourseCell&) const = default;
};

struct CurriculumLayout {
  std::string curriculum_id;
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<Course> courses;
  std::vector<MultiCourseCell> multi_cells;

  const Course* find(const std::string& course_id) const;
  bool contains(const std::string& course_id) const { return find(course_id) != nullptr; }

  bool operator==(const CurriculumLayout&) const = default;
};

enum class Metric { attendance, quiz, assignment };

inline constexpr Metric kAllMetrics[] = {Metric::attendance, Metric::quiz, Metric::assignment};

const char* to_string(Metric m);
std::optional<Metric> metric_from_string(const std::string& s);

/// Metrics are fractions in [0,1]. An absent metric is std::nullopt and is
/// never treated as zero.
struct EngagementRecord {
  std::string student_id;
  std::string course_id;
  std::optional<double> attendance_rate;
  std::optional<double> quiz_score;
  std::optional<double> assignment_submission_rate;
  int cohort_year = 0;

  std::optional<double> metric(Metric m) const;

  bool operator==(const EngagementRecord&) const = default;
};

struct GradeLetter {
  std::string letter;
  double grade_point = 0.0;

  bool operator==(const GradeLetter&) const = default;
};

/// Ordered letter scale, best grade first as listed in grade_scale.json.
struct GradeScale {
  std::string scale_name;
  std::vector<GradeLetter> letters;

  std::optional<double> grade_point(const std::string& letter) const;

  bool operator==(const GradeScale&) const = default;
};

struct GradeRecord {
  std::string student_id;
  std::string course_id;
  std::string letter;
  double grade_point = 0.0;

  bool operator==(const GradeRecord&) const = default;
};

enum class Phase { pre, post };

const char* to_string(Phase p);

struct SurveyAnswer {
  std::string item_id;
  int value = 0;

  bool operator==(const SurveyAnswer&) const = default;
};

struct SurveyResponseSet {
  std::string respondent_id;
  Phase phase = Phase::pre;
  std::string instrument_id;
  std::vector<SurveyAnswer> answers;

  bool operator==(const SurveyResponseSet&) const = default;
};

struct Factor {
  std::string name;
  std::vector<std::string> item_ids;
};

/// Survey instrument: factors in report order, each owning a set of item columns.
struct InstrumentDefinition {
  std::string instrument_id;
  std::vector<Factor> factors;
  int likert_min = 1;
  int likert_max = 7;

  std::size_t item_count() const;
  std::vector<std::string> item_ids() const;

  static InstrumentDefinition tpb();
  static InstrumentDefinition lads();
};

/// Raised by parsers and validators. `location` names the file position
/// (line, column or a JSON path) that caused the failure.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string location, const std::string& message)
      : std::runtime_error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)),
        message_(message) {}

  const std::string& location() const noexcept { return location_; }
  const std::string& detail() const noexcept { return message_; }

 private:
  std::string location_;
  std::string message_;
};

}  // namespace palm
