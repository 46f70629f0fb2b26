#include "palm/map_composer.h"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <set>

#include "palm/ingestion.h"

namespace palm::composer {

using nlohmann::json;
using nlohmann::ordered_json;
using engagement::DisplaySettings;
using engagement::EngagementComposite;
using engagement::Layer;

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

ordered_json opt_num(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json record_to_json(const EngagementRecord& r) {
  ordered_json j;
  j["student_id"] = r.student_id;
  j["course_id"] = r.course_id;
  j["attendance_rate"] = opt_num(r.attendance_rate);
  j["quiz_score"] = opt_num(r.quiz_score);
  j["assignment_submission_rate"] = opt_num(r.assignment_submission_rate);
  j["cohort_year"] = r.cohort_year;
  return j;
}

EngagementRecord record_from_json(const json& j) {
  auto opt = [&](const char* k) -> std::optional<double> {
    const auto& v = j.at(k);
    return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  };
  return EngagementRecord{j.at("student_id").get<std::string>(),
                          j.at("course_id").get<std::string>(),
                          opt("attendance_rate"),
                          opt("quiz_score"),
                          opt("assignment_submission_rate"),
                          j.at("cohort_year").get<int>()};
}

ordered_json grade_to_json(const GradeRecord& g) {
  ordered_json j;
  j["student_id"] = g.student_id;
  j["course_id"] = g.course_id;
  j["letter"] = g.letter;
  j["grade_point"] = g.grade_point;
  return j;
}

ordered_json graph_json(const relevance::RelevanceGraph& g) {
  return ordered_json::parse(relevance::graph_to_json(g));
}

}  // namespace

std::string utc_timestamp_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json config_to_json(const ComposeConfig& c) {
  ordered_json j;
  j["policy"]["min_similarity"] = c.policy.min_similarity;
  j["policy"]["top_k"] = c.policy.top_k ? ordered_json(*c.policy.top_k) : ordered_json(nullptr);
  j["tokenizer"] = relevance::to_string(c.tokenizer);
  j["cohort"]["before_viewer"] = c.cohort.before_viewer;
  j["cohort"]["min_year"] = c.cohort.min_year ? ordered_json(*c.cohort.min_year) : ordered_json(nullptr);
  j["cohort"]["max_year"] = c.cohort.max_year ? ordered_json(*c.cohort.max_year) : ordered_json(nullptr);
  j["cohort"]["min_contributors"] = c.cohort.min_contributors;
  j["grade_scale"] = ordered_json::parse(ingestion::serialize_grade_scale(c.grade_scale));
  return j;
}

ComposeConfig config_from_json(const json& j) {
  ComposeConfig c;
  c.policy.min_similarity = j.at("policy").at("min_similarity").get<double>();
  if (!j.at("policy").at("top_k").is_null()) c.policy.top_k = j["policy"]["top_k"].get<std::size_t>();
  auto mode = relevance::tokenize_mode_from_string(j.at("tokenizer").get<std::string>());
  if (!mode) throw ValidationError("/config/tokenizer", "unknown tokenizer mode");
  c.tokenizer = *mode;
  const auto& co = j.at("cohort");
  c.cohort.before_viewer = co.at("before_viewer").get<bool>();
  if (!co.at("min_year").is_null()) c.cohort.min_year = co["min_year"].get<int>();
  if (!co.at("max_year").is_null()) c.cohort.max_year = co["max_year"].get<int>();
  c.cohort.min_contributors = co.at("min_contributors").get<std::size_t>();
  c.grade_scale = ingestion::parse_grade_scale(j.at("grade_scale").dump());
  return c;
}

std::string snapshot_id_for(const CurriculumLayout& layout, const relevance::RelevanceGraph& graph,
                            const std::vector<EngagementRecord>& engagement,
                            const std::vector<GradeRecord>& grades, const ComposeConfig& config) {
  std::string canonical;
  canonical += ingestion::serialize_layout(layout);
  canonical += relevance::graph_to_json(graph);
  canonical += ingestion::serialize_engagement_csv(engagement);
  for (const auto& g : grades) canonical += grade_to_json(g).dump() + "\n";
  canonical += config_to_json(config).dump();
  return sha256_hex(canonical);
}

MapSnapshot compose(const CurriculumLayout& layout, const relevance::RelevanceGraph& graph,
                    const std::vector<EngagementRecord>& engagement,
                    const std::vector<GradeRecord>& grades, const ComposeConfig& config,
                    std::string created_at) {
  const auto known = ingestion::course_ids(layout);
  auto check = [&](const std::string& id, const std::string& what) {
    if (!known.count(id))
      throw ValidationError(what, "references unknown course_id `" + id + "`");
  };
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    check(graph.edges[i].course_a, "layer1 edge " + std::to_string(i));
    check(graph.edges[i].course_b, "layer1 edge " + std::to_string(i));
  }
  for (std::size_t i = 0; i < engagement.size(); ++i)
    check(engagement[i].course_id, "engagement record " + std::to_string(i));
  for (std::size_t i = 0; i < grades.size(); ++i)
    check(grades[i].course_id, "grade record " + std::to_string(i));

  MapSnapshot s;
  s.snapshot_id = snapshot_id_for(layout, graph, engagement, grades, config);
  s.created_at = created_at.empty() ? utc_timestamp_now() : std::move(created_at);
  s.layout = layout;
  s.layer1 = graph;
  s.engagement = engagement;
  s.layer4 = grades;
  s.config = config;

  const DisplaySettings all_metrics;
  for (const auto& r : engagement)
    s.layer2.push_back(
        engagement::individual_composite(engagement, r.student_id, r.course_id, all_metrics));
  const auto filter = config.cohort.filter_for(std::nullopt);
  for (const auto& c : layout.courses)
    s.layer3.push_back(engagement::cohort_composite(engagement, c.course_id, all_metrics, filter));
  return s;
}

MapView view(const MapSnapshot& snap, const std::optional<std::string>& student_id,
             const DisplaySettings& settings) {
  settings.validate();
  MapView v;
  v.snapshot_id = snap.snapshot_id;
  v.student_id = student_id;
  v.settings = settings;
  v.layout = &snap.layout;

  if (settings.shows(Layer::relevance)) v.relevance = snap.layer1;

  if (settings.shows(Layer::individual)) {
    v.individual.emplace();
    if (student_id) {
      for (const auto& c : snap.layout.courses) {
        auto comp = engagement::individual_composite(snap.engagement, *student_id, c.course_id,
                                                     settings);
        bool has_record = false;
        for (const auto& r : snap.engagement)
          if (r.student_id == *student_id && r.course_id == c.course_id) has_record = true;
        if (has_record) v.individual->push_back(std::move(comp));
      }
    }
  }

  if (settings.shows(Layer::cohort)) {
    std::optional<int> viewer_year;
    if (student_id) viewer_year = engagement::viewer_cohort_year(snap.engagement, *student_id);
    const auto filter = snap.config.cohort.filter_for(viewer_year);
    v.cohort.emplace();
    for (const auto& c : snap.layout.courses)
      v.cohort->push_back(engagement::apply_privacy_floor(
          engagement::cohort_composite(snap.engagement, c.course_id, settings, filter),
          snap.config.cohort.min_contributors));
  }

  if (settings.shows(Layer::grades)) {
    v.grades.emplace();
    if (student_id && settings.grade_mode != engagement::GradeMode::none) {
      for (const auto& c : snap.layout.courses)
        for (const auto& g : snap.layer4)
          if (g.student_id == *student_id && g.course_id == c.course_id)
            v.grades->push_back({g.course_id, g.letter, g.grade_point});
    }
  }
  return v;
}

ordered_json to_json(const MapView& v) {
  ordered_json j;
  j["snapshot_id"] = v.snapshot_id;
  j["student_id"] = v.student_id ? ordered_json(*v.student_id) : ordered_json(nullptr);
  j["settings"] = engagement::to_json(v.settings);

  const CurriculumLayout& layout = *v.layout;
  ordered_json base;
  base["curriculum_id"] = layout.curriculum_id;
  base["rows"] = layout.rows;
  base["columns"] = layout.columns;
  base["blocks"] = ordered_json::array();
  for (const auto& c : layout.courses) {
    ordered_json b;
    b["course_id"] = c.course_id;
    b["title"] = c.title;
    b["objective_row"] = c.objective_row;
    b["semester_index"] = c.semester_index;
    b["credits"] = c.credits;
    base["blocks"].push_back(std::move(b));
  }
  if (!layout.multi_cells.empty()) {
    base["multi_cells"] = ordered_json::array();
    for (const auto& m : layout.multi_cells)
      base["multi_cells"].push_back({{"objective_row", m.objective_row},
                                     {"semester_index", m.semester_index},
                                     {"order", m.order}});
  }
  j["base"] = std::move(base);

  ordered_json layers = ordered_json::object();
  if (v.relevance) layers["relevance"] = graph_json(*v.relevance);
  if (v.individual) {
    layers["individual"] = ordered_json::array();
    for (const auto& c : *v.individual) layers["individual"].push_back(engagement::to_json(c));
  }
  if (v.cohort) {
    layers["cohort"] = ordered_json::array();
    for (const auto& c : *v.cohort) layers["cohort"].push_back(engagement::to_json(c));
  }
  if (v.grades) {
    layers["grades"] = ordered_json::array();
    for (const auto& p : *v.grades) {
      ordered_json pin;
      pin["course_id"] = p.course_id;
      if (v.settings.grade_mode == engagement::GradeMode::letter)
        pin["marker"] = p.letter;
      else
        pin["marker"] = p.grade_point;
      layers["grades"].push_back(std::move(pin));
    }
  }
  j["layers"] = std::move(layers);
  return j;
}

std::string snapshot_to_json(const MapSnapshot& s) {
  ordered_json j;
  j["snapshot_id"] = s.snapshot_id;
  j["created_at"] = s.created_at;
  j["config"] = config_to_json(s.config);
  j["layout"] = ordered_json::parse(ingestion::serialize_layout(s.layout));
  j["layer1"] = graph_json(s.layer1);
  j["engagement"] = ordered_json::array();
  for (const auto& r : s.engagement) j["engagement"].push_back(record_to_json(r));
  j["layer2"] = ordered_json::array();
  for (const auto& c : s.layer2) {
    auto cj = engagement::to_json(c);
    cj["student_id"] = *c.student_id;
    j["layer2"].push_back(std::move(cj));
  }
  j["layer3"] = ordered_json::array();
  for (const auto& c : s.layer3) j["layer3"].push_back(engagement::to_json(c));
  j["layer4"] = ordered_json::array();
  for (const auto& g : s.layer4) j["layer4"].push_back(grade_to_json(g));
  return j.dump(1) + "\n";
}

MapSnapshot snapshot_from_json(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error&) {
    throw ValidationError("snapshot", "malformed snapshot JSON");
  }
  try {
    ComposeConfig config = config_from_json(j.at("config"));
    CurriculumLayout layout = ingestion::parse_layout(j.at("layout").dump());
    relevance::RelevanceGraph graph = relevance::graph_from_json(j.at("layer1").dump());
    std::vector<EngagementRecord> records;
    for (const auto& r : j.at("engagement")) records.push_back(record_from_json(r));
    std::vector<GradeRecord> grades;
    for (const auto& g : j.at("layer4"))
      grades.push_back({g.at("student_id").get<std::string>(), g.at("course_id").get<std::string>(),
                        g.at("letter").get<std::string>(), g.at("grade_point").get<double>()});
    MapSnapshot s = compose(layout, graph, records, grades, config,
                            j.at("created_at").get<std::string>());
    if (s.snapshot_id != j.at("snapshot_id").get<std::string>())
      throw ValidationError("snapshot", "content hash mismatch for " +
                                            j.at("snapshot_id").get<std::string>());
    return s;
  } catch (const json::exception& e) {
    throw ValidationError("snapshot", e.what());
  }
}

engagement::HoverSources hover_sources(const MapSnapshot& s) {
  return engagement::HoverSources{s.layout, s.layer1, s.engagement, s.layer4, s.config.cohort};
}

}  // namespace palm::composer
