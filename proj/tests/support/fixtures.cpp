#include "fixtures.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace palm::testing {

double Rng::normal(double mu, double sigma) {
  // Box-Muller on our own uniforms keeps the stream portable.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  return mu + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

const std::vector<std::vector<std::string>> kTopics = {
    {"calculus", "limit", "derivative", "integral", "series", "function", "mathematics"},
    {"circuit", "voltage", "current", "resistor", "capacitor", "signal", "electrical"},
    {"program", "variable", "loop", "function", "recursion", "compiler", "language"},
    {"algorithm", "graph", "sorting", "complexity", "tree", "search", "data"},
    {"probability", "statistics", "distribution", "variance", "estimation", "sample", "data"},
    {"network", "protocol", "packet", "routing", "layer", "socket", "internet"},
    {"linear", "matrix", "vector", "eigenvalue", "space", "basis", "mathematics"},
    {"physics", "mechanics", "force", "energy", "wave", "field", "electromagnetic"},
    {"database", "query", "relation", "index", "transaction", "schema", "data"},
    {"machine", "learning", "model", "training", "regression", "classification", "data"},
};

const std::vector<std::string> kCommon = {"course", "students", "lecture", "week", "introduction",
                                          "exercise", "report"};

std::string words(Rng& rng, const std::vector<std::string>& vocab, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (!out.empty()) out += ' ';
    out += vocab[rng.below(static_cast<std::uint32_t>(vocab.size()))];
  }
  return out;
}

}  // namespace

CurriculumLayout make_layout(std::size_t n_courses, std::uint32_t seed) {
  Rng rng(seed);
  CurriculumLayout layout;
  layout.curriculum_id = "synthetic-" + std::to_string(n_courses);
  const std::size_t cols = 8;
  const std::size_t rows = (n_courses + cols - 1) / cols;
  for (std::size_t r = 0; r < rows; ++r) layout.rows.push_back("Objective " + std::to_string(r + 1));
  for (std::size_t c = 0; c < cols; ++c) layout.columns.push_back("Semester " + std::to_string(c + 1));
  for (std::size_t i = 0; i < n_courses; ++i) {
    Course c;
    char id[32];
    std::snprintf(id, sizeof id, "C%03zu", i);
    c.course_id = id;
    const auto& topic = kTopics[i % kTopics.size()];
    const auto& other = kTopics[rng.below(static_cast<std::uint32_t>(kTopics.size()))];
    c.title = topic[0] + std::string(" ") + std::to_string(i / kTopics.size() + 1);
    c.objective_row = static_cast<int>(i / cols);
    c.semester_index = static_cast<int>(i % cols);
    c.credits = 1.0 + static_cast<double>(rng.below(4));
    c.overview_text = words(rng, topic, 12) + " " + words(rng, kCommon, 4);
    c.lecture_plan_text = words(rng, topic, 8) + " " + words(rng, other, 4);
    layout.courses.push_back(std::move(c));
  }
  return layout;
}

std::vector<EngagementRecord> make_engagement(const CurriculumLayout& layout,
                                              std::size_t n_students, std::size_t per_student,
                                              std::uint32_t seed) {
  Rng rng(seed);
  std::vector<EngagementRecord> out;
  const auto n_courses = static_cast<std::uint32_t>(layout.courses.size());
  for (std::size_t s = 0; s < n_students; ++s) {
    const std::string sid = "s" + std::to_string(s + 1);
    const int year = 2019 + static_cast<int>(s % 5);
    std::vector<std::uint32_t> picked;
    while (picked.size() < std::min<std::size_t>(per_student, n_courses)) {
      auto c = rng.below(n_courses);
      if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
    }
    for (auto c : picked) {
      EngagementRecord r;
      r.student_id = sid;
      r.course_id = layout.courses[c].course_id;
      r.cohort_year = year;
      auto metric = [&]() -> std::optional<double> {
        if (rng.below(10) == 0) return std::nullopt;
        return std::round(rng.uniform() * 100.0) / 100.0;
      };
      r.attendance_rate = metric();
      r.quiz_score = metric();
      r.assignment_submission_rate = metric();
      out.push_back(std::move(r));
    }
  }
  return out;
}

GradeScale five_letter_scale() {
  return GradeScale{"five-letter", {{"A", 4.0}, {"B", 3.0}, {"C", 2.0}, {"D", 1.0}, {"F", 0.0}}};
}

std::vector<GradeRecord> make_grades(const std::vector<EngagementRecord>& engagement,
                                     const GradeScale& scale, std::uint32_t seed) {
  Rng rng(seed);
  std::vector<GradeRecord> out;
  for (const auto& r : engagement) {
    if (rng.below(4) == 0) continue;
    const auto& l = scale.letters[rng.below(static_cast<std::uint32_t>(scale.letters.size()))];
    out.push_back({r.student_id, r.course_id, l.letter, l.grade_point});
  }
  return out;
}

SurveyFixture make_survey(const InstrumentDefinition& instrument, std::size_t respondents,
                          double shift, std::uint32_t seed) {
  Rng rng(seed);
  SurveyFixture f;
  auto clamp_likert = [&](double v) {
    return std::clamp(static_cast<int>(std::lround(v)), instrument.likert_min, instrument.likert_max);
  };
  for (std::size_t i = 0; i < respondents; ++i) {
    const std::string id = "r" + std::to_string(i + 1);
    SurveyResponseSet pre{id, Phase::pre, instrument.instrument_id, {}};
    SurveyResponseSet post{id, Phase::post, instrument.instrument_id, {}};
    const double level = rng.normal(4.2, 0.8);
    const double gain = rng.normal(shift, 0.5);
    for (const auto& item : instrument.item_ids()) {
      pre.answers.push_back({item, clamp_likert(level + rng.normal(0, 0.7))});
      post.answers.push_back({item, clamp_likert(level + gain + rng.normal(0, 0.7))});
    }
    f.pre.push_back(std::move(pre));
    f.post.push_back(std::move(post));
  }
  return f;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

std::string read_fixture(const std::string& name) {
  return read_text(std::filesystem::path(PALM_FIXTURE_DIR) / name);
}

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "palm-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace palm::testing
