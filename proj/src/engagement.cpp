#include "palm/engagement.h"

#include <algorithm>

namespace palm::engagement {

const char* to_string(GradeMode m) {
  switch (m) {
    case GradeMode::letter: return "letter";
    case GradeMode::grade_point: return "grade_point";
    case GradeMode::none: return "none";
  }
  return "?";
}

const char* to_string(Layer l) {
  switch (l) {
    case Layer::relevance: return "relevance";
    case Layer::individual: return "individual";
    case Layer::cohort: return "cohort";
    case Layer::grades: return "grades";
  }
  return "?";
}

std::optional<GradeMode> grade_mode_from_string(const std::string& s) {
  for (auto m : {GradeMode::letter, GradeMode::grade_point, GradeMode::none})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

std::optional<Layer> layer_from_string(const std::string& s) {
  for (auto l : kAllLayers)
    if (s == to_string(l)) return l;
  return std::nullopt;
}

void DisplaySettings::validate() const {
  if (metrics_included.empty() && (shows(Layer::individual) || shows(Layer::cohort)))
    throw std::invalid_argument("metrics_included must be non-empty when an engagement layer is shown");
}

CohortFilter CohortPolicy::filter_for(std::optional<int> viewer_cohort_year) const {
  CohortFilter f{min_year, max_year};
  if (before_viewer && viewer_cohort_year) {
    int bound = *viewer_cohort_year - 1;
    f.max_year = f.max_year ? std::min(*f.max_year, bound) : bound;
  }
  return f;
}

namespace {

std::optional<double> mean_of_present(const std::map<Metric, std::optional<double>>& parts) {
  double sum = 0.0;
  int n = 0;
  for (const auto& [_, v] : parts) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace

EngagementComposite individual_composite(const std::vector<EngagementRecord>& records,
                                         const std::string& student_id,
                                         const std::string& course_id,
                                         const DisplaySettings& settings) {
  EngagementComposite c;
  c.course_id = course_id;
  c.student_id = student_id;
  for (Metric m : settings.metrics_included) c.parts[m] = std::nullopt;
  auto it = std::find_if(records.begin(), records.end(), [&](const EngagementRecord& r) {
    return r.student_id == student_id && r.course_id == course_id;
  });
  if (it == records.end()) return c;
  for (Metric m : settings.metrics_included) c.parts[m] = it->metric(m);
  c.value = mean_of_present(c.parts);
  c.n_contributors = c.value ? 1 : 0;
  return c;
}

EngagementComposite cohort_composite(const std::vector<EngagementRecord>& records,
                                     const std::string& course_id,
                                     const DisplaySettings& settings, const CohortFilter& filter) {
  EngagementComposite c;
  c.course_id = course_id;
  std::map<Metric, std::pair<double, std::size_t>> sums;
  std::set<std::string> contributors;
  for (const auto& r : records) {
    if (r.course_id != course_id || !filter.accepts(r.cohort_year)) continue;
    for (Metric m : settings.metrics_included) {
      if (auto v = r.metric(m)) {
        sums[m].first += *v;
        sums[m].second += 1;
        contributors.insert(r.student_id);
      }
    }
  }
  for (Metric m : settings.metrics_included) {
    auto it = sums.find(m);
    c.parts[m] = it == sums.end() ? std::nullopt
                                  : std::optional<double>(it->second.first /
                                                          static_cast<double>(it->second.second));
  }
  c.value = mean_of_present(c.parts);
  c.n_contributors = contributors.size();
  return c;
}

EngagementComposite apply_privacy_floor(EngagementComposite c, std::size_t min_contributors) {
  if (c.n_contributors < min_contributors) {
    c.value.reset();
    for (auto& [_, v] : c.parts) v.reset();
    c.suppressed = true;
  }
  return c;
}

std::optional<int> viewer_cohort_year(const std::vector<EngagementRecord>& records,
                                      const std::string& student_id) {
  std::optional<int> year;
  for (const auto& r : records)
    if (r.student_id == student_id && (!year || r.cohort_year < *year)) year = r.cohort_year;
  return year;
}

HoverCard hover_payload(const HoverSources& src, const std::string& course_id,
                        const std::optional<std::string>& student_id,
                        const DisplaySettings& settings) {
  const Course* course = src.layout.find(course_id);
  if (!course) throw NotFoundError("unknown course_id `" + course_id + "`");

  HoverCard card;
  card.course = *course;
  card.student_id = student_id;
  card.grade_mode = settings.grade_mode;
  std::optional<int> viewer_year;
  if (student_id) {
    card.individual = individual_composite(src.engagement, *student_id, course_id, settings);
    viewer_year = viewer_cohort_year(src.engagement, *student_id);
    if (settings.grade_mode != GradeMode::none) {
      for (const auto& g : src.grades) {
        if (g.student_id == *student_id && g.course_id == course_id) {
          card.grade = GradeMarker{course_id, g.letter, g.grade_point};
          break;
        }
      }
    }
  }
  card.cohort = apply_privacy_floor(
      cohort_composite(src.engagement, course_id, settings,
                       src.cohort_policy.filter_for(viewer_year)),
      src.cohort_policy.min_contributors);

  for (const auto& e : src.graph.edges) {
    const std::string* other = e.course_a == course_id   ? &e.course_b
                               : e.course_b == course_id ? &e.course_a
                                                         : nullptr;
    if (!other) continue;
    const Course* oc = src.layout.find(*other);
    card.neighbors.push_back({*other, oc ? oc->title : std::string(), e.similarity});
  }
  std::stable_sort(card.neighbors.begin(), card.neighbors.end(),
                   [](const Neighbor& x, const Neighbor& y) {
                     if (x.similarity != y.similarity) return x.similarity > y.similarity;
                     return x.course_id < y.course_id;
                   });
  return card;
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json opt(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json to_json(const EngagementComposite& c) {
  nlohmann::ordered_json j;
  j["course_id"] = c.course_id;
  j["value"] = opt(c.value);
  j["parts"] = nlohmann::ordered_json::object();
  for (const auto& [m, v] : c.parts) j["parts"][to_string(m)] = opt(v);
  if (c.is_cohort()) {
    j["n_contributors"] = c.n_contributors;
    j["suppressed"] = c.suppressed;
  }
  return j;
}

nlohmann::ordered_json to_json(const DisplaySettings& s) {
  nlohmann::ordered_json j;
  j["metrics"] = nlohmann::ordered_json::array();
  for (Metric m : s.metrics_included) j["metrics"].push_back(to_string(m));
  j["grade_mode"] = to_string(s.grade_mode);
  j["layers"] = nlohmann::ordered_json::array();
  for (Layer l : s.show_layers) j["layers"].push_back(to_string(l));
  return j;
}

nlohmann::ordered_json to_json(const HoverCard& card) {
  nlohmann::ordered_json j;
  const Course& c = card.course;
  j["course"] = {{"course_id", c.course_id},
                 {"title", c.title},
                 {"objective_row", c.objective_row},
                 {"semester_index", c.semester_index},
                 {"credits", c.credits},
                 {"overview_text", c.overview_text},
                 {"lecture_plan_text", c.lecture_plan_text}};
  j["student_id"] = card.student_id ? nlohmann::ordered_json(*card.student_id) : nullptr;
  j["individual"] = card.individual ? to_json(*card.individual) : nlohmann::ordered_json(nullptr);
  j["cohort"] = to_json(card.cohort);
  j["grade_mode"] = to_string(card.grade_mode);
  if (!card.grade) {
    j["grade"] = nullptr;
  } else if (card.grade_mode == GradeMode::letter) {
    j["grade"] = card.grade->letter;
  } else {
    j["grade"] = card.grade->grade_point;
  }
  j["neighbors"] = nlohmann::ordered_json::array();
  for (const auto& n : card.neighbors)
    j["neighbors"].push_back(
        {{"course_id", n.course_id}, {"title", n.title}, {"similarity", n.similarity}});
  return j;
}

}  // namespace palm::engagement
