#include "palm/service.h"

#include <algorithm>
#include <cctype>

namespace palm::service {

using nlohmann::ordered_json;

namespace {

std::string summarize(const std::vector<InputProblem>& problems) {
  std::string msg = std::to_string(problems.size()) + " input problem(s)";
  if (!problems.empty()) {
    const auto& p = problems.front();
    msg += "; first: " + p.file + " " + p.location + ": " + p.message;
  }
  return msg;
}

template <typename R>
void collect(const std::string& file, const ingestion::CsvResult<R>& res,
             std::vector<InputProblem>& out, bool include_unknown_course) {
  for (const auto& r : res.rejects) {
    if (r.kind == ingestion::RejectKind::unknown_course && !include_unknown_course) continue;
    out.push_back({file, "line " + std::to_string(r.line), ingestion::to_string(r.kind), r.message});
  }
}

InputProblem from_error(const std::string& file, const ValidationError& e) {
  return {file, e.location(), "invalid", e.detail()};
}

}  // namespace

IngestRejected::IngestRejected(std::vector<InputProblem> problems)
    : ValidationError("", summarize(problems)), problems_(std::move(problems)) {}

ParsedInputs parse_inputs(const IngestInputs& in, const std::optional<GradeScale>& fallback_scale) {
  ParsedInputs out;
  std::vector<InputProblem> problems;
  try {
    out.layout = ingestion::parse_layout(in.layout);
  } catch (const ValidationError& e) {
    throw IngestRejected({from_error("layout", e)});
  }
  const auto known = ingestion::course_ids(out.layout);

  if (!in.engagement.empty()) {
    try {
      out.engagement = ingestion::parse_engagement_csv(in.engagement, known);
      collect("engagement", out.engagement, problems, false);
    } catch (const ValidationError& e) {
      problems.push_back(from_error("engagement", e));
    }
  }

  bool have_scale = false;
  if (in.grade_scale) {
    try {
      out.scale = ingestion::parse_grade_scale(*in.grade_scale);
      have_scale = true;
    } catch (const ValidationError& e) {
      problems.push_back(from_error("grade_scale", e));
    }
  } else if (fallback_scale) {
    out.scale = *fallback_scale;
    have_scale = true;
  }

  if (!in.grades.empty()) {
    if (!have_scale) {
      if (!in.grade_scale)
        problems.push_back({"grade_scale", "", "missing", "grades given but no grade scale configured"});
    } else {
      try {
        out.grades = ingestion::parse_grades_csv(in.grades, out.scale, known);
        collect("grades", out.grades, problems, false);
      } catch (const ValidationError& e) {
        problems.push_back(from_error("grades", e));
      }
    }
  }
  if (!problems.empty()) throw IngestRejected(std::move(problems));
  return out;
}

composer::MapSnapshot compute_snapshot(const ParsedInputs& parsed, const ServiceConfig& config,
                                       std::string created_at) {
  relevance::TfidfOptions opts;
  opts.mode = config.tokenizer;
  auto vectors = relevance::build_tfidf(parsed.layout, opts);
  auto graph = relevance::build_graph(vectors, config.policy);
  return composer::compose(parsed.layout, graph, parsed.engagement.records, parsed.grades.records,
                           config.compose_config(parsed.scale), std::move(created_at));
}

ordered_json problems_to_json(const std::vector<InputProblem>& problems) {
  ordered_json arr = ordered_json::array();
  for (const auto& p : problems) {
    ordered_json j;
    j["file"] = p.file;
    j["location"] = p.location;
    j["kind"] = p.kind;
    j["message"] = p.message;
    arr.push_back(std::move(j));
  }
  return arr;
}

ordered_json ingest_summary(const ParsedInputs& parsed, const composer::MapSnapshot* snapshot) {
  ordered_json j;
  j["snapshot_id"] = snapshot ? ordered_json(snapshot->snapshot_id) : ordered_json(nullptr);
  j["counts"]["courses"] = parsed.layout.courses.size();
  j["counts"]["engagement_records"] = parsed.engagement.records.size();
  j["counts"]["grade_records"] = parsed.grades.records.size();
  if (snapshot) j["counts"]["edges"] = snapshot->layer1.edges.size();
  std::vector<InputProblem> rejects;
  collect("engagement", parsed.engagement, rejects, true);
  collect("grades", parsed.grades, rejects, true);
  j["rejects"] = problems_to_json(rejects);
  return j;
}

std::optional<InstrumentDefinition> preset_instrument(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (name == "tpb") return InstrumentDefinition::tpb();
  if (name == "lads") return InstrumentDefinition::lads();
  return std::nullopt;
}

SurveyAnalysis analyze_survey(std::string_view pre_csv, std::string_view post_csv,
                              const InstrumentDefinition& instrument, double alpha_normality) {
  std::vector<InputProblem> problems;
  auto parse = [&](std::string_view bytes, const char* file, Phase expected) {
    std::vector<SurveyResponseSet> out;
    try {
      auto res = ingestion::parse_survey_csv(bytes, instrument);
      collect(file, res.result, problems, true);
      for (std::size_t i = 0; i < res.result.records.size(); ++i) {
        if (res.result.records[i].phase != expected)
          problems.push_back({file, "", "wrong_phase",
                              "respondent `" + res.result.records[i].respondent_id + "` has phase `" +
                                  to_string(res.result.records[i].phase) + "`"});
      }
      out = std::move(res.result.records);
    } catch (const ValidationError& e) {
      problems.push_back(from_error(file, e));
    }
    return out;
  };
  auto pre = parse(pre_csv, "pre", Phase::pre);
  auto post = parse(post_csv, "post", Phase::post);
  if (!problems.empty()) throw IngestRejected(std::move(problems));

  std::vector<SurveyResponseSet> all(pre);
  all.insert(all.end(), post.begin(), post.end());
  SurveyAnalysis a;
  a.instrument = instrument;
  a.alpha_normality = alpha_normality;
  try {
    auto table = stats::factor_scores(all, instrument);
    a.excluded_respondents = table.excluded;
    a.reports = stats::run_comparison(table, instrument, {alpha_normality});
  } catch (const stats::StatsError& e) {
    throw IngestRejected({{"survey", "", "invalid", e.what()}});
  }
  return a;
}

namespace {

ordered_json opt(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

ordered_json to_json(const stats::TestReport& r) {
  ordered_json j;
  j["factor_name"] = r.factor_name;
  j["n"] = r.n;
  j["mean_pre"] = r.mean_pre;
  j["sd_pre"] = r.sd_pre;
  j["mean_post"] = r.mean_post;
  j["sd_post"] = r.sd_post;
  j["shapiro_w"] = opt(r.shapiro_w);
  j["shapiro_p"] = opt(r.shapiro_p);
  j["normal"] = r.normal;
  j["t_stat"] = opt(r.t_stat);
  j["t_p"] = opt(r.t_p);
  j["df"] = r.df;
  j["wilcoxon_stat"] = opt(r.wilcoxon_stat);
  j["wilcoxon_p"] = opt(r.wilcoxon_p);
  j["wilcoxon_method"] =
      r.wilcoxon_method ? ordered_json(stats::to_string(*r.wilcoxon_method)) : ordered_json(nullptr);
  if (r.effect) {
    const auto& e = *r.effect;
    j["effect"] = {{"d", e.d},           {"d_abs", e.d_abs},   {"mean_diff", e.mean_diff},
                   {"s_d", e.s_d},       {"s_a_sq", e.s_a_sq}, {"s_b_sq", e.s_b_sq},
                   {"s_ab", e.s_ab},     {"large", e.large()}};
  } else {
    j["effect"] = nullptr;
  }
  j["stars"] = r.stars;
  j["zero_variance"] = r.zero_variance;
  j["errors"] = r.errors;
  return j;
}

ordered_json to_json(const SurveyAnalysis& a) {
  ordered_json j;
  j["instrument"] = a.instrument.instrument_id;
  j["metadata"]["sd"] = "sample standard deviation (n-1)";
  j["metadata"]["normality_test"] = "shapiro_wilk on paired differences";
  j["metadata"]["alpha_normality"] = a.alpha_normality;
  j["metadata"]["difference"] = "pre - post";
  j["excluded_respondents"] = a.excluded_respondents;
  j["reports"] = ordered_json::array();
  for (const auto& r : a.reports) j["reports"].push_back(to_json(r));
  return j;
}

}  // namespace palm::service
