#include "palm/types.h"

#include <cstdio>

namespace palm {

const Course* CurriculumLayout::find(const std::string& course_id) const {
  for (const auto& c : courses)
    if (c.course_id == course_id) return &c;
  return nullptr;
}

const char* to_string(Metric m) {
  switch (m) {
    case Metric::attendance: return "attendance";
    case Metric::quiz: return "quiz";
    case Metric::assignment: return "assignment";
  }
  return "?";
}

std::optional<Metric> metric_from_string(const std::string& s) {
  for (Metric m : kAllMetrics)
    if (s == to_string(m)) return m;
  return std::nullopt;
}

std::optional<double> EngagementRecord::metric(Metric m) const {
  switch (m) {
    case Metric::attendance: return attendance_rate;
    case Metric::quiz: return quiz_score;
    case Metric::assignment: return assignment_submission_rate;
  }
  return std::nullopt;
}

std::optional<double> GradeScale::grade_point(const std::string& letter) const {
  for (const auto& l : letters)
    if (l.letter == letter) return l.grade_point;
  return std::nullopt;
}

const char* to_string(Phase p) { return p == Phase::pre ? "pre" : "post"; }

std::size_t InstrumentDefinition::item_count() const {
  std::size_t n = 0;
  for (const auto& f : factors) n += f.item_ids.size();
  return n;
}

std::vector<std::string> InstrumentDefinition::item_ids() const {
  std::vector<std::string> ids;
  for (const auto& f : factors) ids.insert(ids.end(), f.item_ids.begin(), f.item_ids.end());
  return ids;
}

namespace {

InstrumentDefinition make_preset(std::string id,
                                 std::initializer_list<std::pair<const char*, int>> factors) {
  InstrumentDefinition def;
  def.instrument_id = std::move(id);
  int item = 1;
  for (const auto& [name, count] : factors) {
    Factor f{name, {}};
    for (int i = 0; i < count; ++i, ++item) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "i%02d", item);
      f.item_ids.emplace_back(buf);
    }
    def.factors.push_back(std::move(f));
  }
  return def;
}

}  // namespace

// 16 items: 4 + 6 + 3 + 3.
InstrumentDefinition InstrumentDefinition::tpb() {
  return make_preset("TPB", {{"intention", 4},
                             {"attitude", 6},
                             {"subjective_norm", 3},
                             {"behavioral_control", 3}});
}

// 28 items over five factors. Per-factor counts are a deployment choice;
// pass a custom instrument file when the local questionnaire differs.
InstrumentDefinition InstrumentDefinition::lads() {
  return make_preset("LADS", {{"visual_attraction", 6},
                              {"usability", 6},
                              {"understanding_level", 5},
                              {"perceived_usefulness", 6},
                              {"behavioral_changes", 5}});
}

}  // namespace palm
