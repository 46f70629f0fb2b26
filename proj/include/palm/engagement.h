#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "palm/relevance.h"
#include "palm/types.h"

namespace palm::engagement {

enum class GradeMode { letter, grade_point, none };
enum class Layer { relevance, individual, cohort, grades };

const char* to_string(GradeMode m);
const char* to_string(Layer l);
std::optional<GradeMode> grade_mode_from_string(const std::string& s);
std::optional<Layer> layer_from_string(const std::string& s);

inline constexpr Layer kAllLayers[] = {Layer::relevance, Layer::individual, Layer::cohort,
                                       Layer::grades};

struct DisplaySettings {
  std::set<Metric> metrics_included{Metric::attendance, Metric::quiz, Metric::assignment};
  GradeMode grade_mode = GradeMode::letter;
  std::set<Layer> show_layers{Layer::relevance, Layer::individual, Layer::cohort, Layer::grades};

  bool shows(Layer l) const { return show_layers.count(l) != 0; }
  /// Throws std::invalid_argument if an engagement layer is shown with no metrics.
  void validate() const;
};

/// Inclusive cohort-year window; an unset bound is open.
struct CohortFilter {
  std::optional<int> min_year;
  std::optional<int> max_year;

  bool accepts(int year) const {
    return (!min_year || year >= *min_year) && (!max_year || year <= *max_year);
  }
};

/// Which past takers populate the cohort layer, and the display floor.
struct CohortPolicy {
  /// When true, only cohort years strictly before the viewer's own cohort
  /// year count ("past course takers"); the fixed bounds below still apply.
  bool before_viewer = true;
  std::optional<int> min_year;
  std::optional<int> max_year;
  std::size_t min_contributors = 3;

  CohortFilter filter_for(std::optional<int> viewer_cohort_year) const;

  bool operator==(const CohortPolicy&) const = default;
};

struct EngagementComposite {
  std::string course_id;
  std::optional<std::string> student_id;  // empty for a cohort composite
  std::optional<double> value;
  std::map<Metric, std::optional<double>> parts;  // one entry per included metric
  std::size_t n_contributors = 0;
  bool suppressed = false;  // cohort below the minimum size

  bool is_cohort() const { return !student_id.has_value(); }
};

/// Mean over the included, non-missing metrics of the student's record for
/// the course. Missing when the student has no such record or every included
/// metric is missing.
EngagementComposite individual_composite(const std::vector<EngagementRecord>& records,
                                         const std::string& student_id,
                                         const std::string& course_id,
                                         const DisplaySettings& settings);

/// Per-metric mean over matching records, then the mean of those means.
/// n_contributors counts distinct students with at least one non-missing
/// included metric. No minimum-size rule is applied here.
EngagementComposite cohort_composite(const std::vector<EngagementRecord>& records,
                                     const std::string& course_id,
                                     const DisplaySettings& settings, const CohortFilter& filter);

/// Blanks value and parts when fewer than `min_contributors` students contributed.
EngagementComposite apply_privacy_floor(EngagementComposite c, std::size_t min_contributors);

/// Earliest cohort year across the student's records.
std::optional<int> viewer_cohort_year(const std::vector<EngagementRecord>& records,
                                      const std::string& student_id);

struct GradeMarker {
  std::string course_id;
  std::string letter;
  double grade_point = 0.0;
};

struct Neighbor {
  std::string course_id;
  std::string title;
  double similarity = 0.0;
};

struct HoverCard {
  Course course;
  std::optional<std::string> student_id;
  std::optional<EngagementComposite> individual;
  EngagementComposite cohort;
  std::optional<GradeMarker> grade;  // absent under GradeMode::none
  GradeMode grade_mode = GradeMode::letter;
  std::vector<Neighbor> neighbors;   // by similarity, strongest first
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HoverSources {
  const CurriculumLayout& layout;
  const relevance::RelevanceGraph& graph;
  const std::vector<EngagementRecord>& engagement;
  const std::vector<GradeRecord>& grades;
  const CohortPolicy& cohort_policy;
};

/// Throws NotFoundError for an unknown course id.
HoverCard hover_payload(const HoverSources& sources, const std::string& course_id,
                        const std::optional<std::string>& student_id,
                        const DisplaySettings& settings);

nlohmann::ordered_json to_json(const EngagementComposite& c);
nlohmann::ordered_json to_json(const HoverCard& card);
nlohmann::ordered_json to_json(const DisplaySettings& s);

}  // namespace palm::engagement
