#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "palm/engagement.h"
#include "palm/relevance.h"
#include "palm/types.h"

namespace palm::composer {

/// Everything besides the data files that influences a snapshot.
struct ComposeConfig {
  relevance::RenderPolicy policy;
  relevance::TokenizeMode tokenizer = relevance::TokenizeMode::auto_detect;
  engagement::CohortPolicy cohort;
  GradeScale grade_scale;
};

/// Immutable composed map. Layer 0 is the layout itself.
struct MapSnapshot {
  std::string snapshot_id;  // SHA-256 over canonical inputs + config
  std::string created_at;   // not part of the id
  CurriculumLayout layout;
  relevance::RelevanceGraph layer1;
  std::vector<EngagementRecord> engagement;  // source rows for per-view recomputation
  std::vector<engagement::EngagementComposite> layer2;  // per (student, course), all metrics
  std::vector<engagement::EngagementComposite> layer3;  // per course, configured years, no floor
  std::vector<GradeRecord> layer4;
  ComposeConfig config;
};

/// Throws ValidationError when an edge, record or grade cites a course that
/// is not in the layout.
MapSnapshot compose(const CurriculumLayout& layout, const relevance::RelevanceGraph& graph,
                    const std::vector<EngagementRecord>& engagement,
                    const std::vector<GradeRecord>& grades, const ComposeConfig& config,
                    std::string created_at = {});

std::string snapshot_id_for(const CurriculumLayout& layout, const relevance::RelevanceGraph& graph,
                            const std::vector<EngagementRecord>& engagement,
                            const std::vector<GradeRecord>& grades, const ComposeConfig& config);

struct GradePin {
  std::string course_id;
  std::string letter;
  double grade_point = 0.0;
};

/// What one student sees for one set of display settings. Layers not in
/// settings.show_layers are absent (nullopt).
struct MapView {
  std::string snapshot_id;
  std::optional<std::string> student_id;
  engagement::DisplaySettings settings;
  const CurriculumLayout* layout = nullptr;
  std::optional<relevance::RelevanceGraph> relevance;
  std::optional<std::vector<engagement::EngagementComposite>> individual;
  std::optional<std::vector<engagement::EngagementComposite>> cohort;
  std::optional<std::vector<GradePin>> grades;
};

/// Pure projection of a snapshot. An unknown student gets empty personal
/// layers; the cohort layer is still populated. Cohort composites below the
/// configured minimum size are blanked.
MapView view(const MapSnapshot& snapshot, const std::optional<std::string>& student_id,
             const engagement::DisplaySettings& settings);

nlohmann::ordered_json to_json(const MapView& view);
nlohmann::ordered_json config_to_json(const ComposeConfig& config);
ComposeConfig config_from_json(const nlohmann::json& j);

/// Full snapshot document (store/<id>.json).
std::string snapshot_to_json(const MapSnapshot& snapshot);
/// Rebuilds the snapshot and checks the recomputed id against the stored one.
MapSnapshot snapshot_from_json(std::string_view bytes);

engagement::HoverSources hover_sources(const MapSnapshot& snapshot);

std::string utc_timestamp_now();

}  // namespace palm::composer
