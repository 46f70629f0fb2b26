#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "palm/types.h"

namespace palm::testing {

/// Deterministic generator: mt19937 output is specified by the standard, the
/// helpers below avoid the implementation-defined distributions.
class Rng {
 public:
  explicit Rng(std::uint32_t seed) : gen_(seed) {}
  std::uint32_t below(std::uint32_t n) { return gen_() % n; }
  double uniform() { return static_cast<double>(gen_()) / 4294967296.0; }
  double normal(double mu = 0.0, double sigma = 1.0);

 private:
  std::mt19937 gen_;
};

/// `n_courses` courses on a grid large enough to give each its own cell,
/// syllabus text drawn from overlapping topic vocabularies.
CurriculumLayout make_layout(std::size_t n_courses, std::uint32_t seed);

/// `n_students` students, each with `per_student` course records; some
/// metrics are missing. Cohort years span 2019..2023.
std::vector<EngagementRecord> make_engagement(const CurriculumLayout& layout,
                                              std::size_t n_students, std::size_t per_student,
                                              std::uint32_t seed);

GradeScale five_letter_scale();

std::vector<GradeRecord> make_grades(const std::vector<EngagementRecord>& engagement,
                                     const GradeScale& scale, std::uint32_t seed);

/// Likert responses for every instrument item; post answers shifted upward
/// by roughly `shift` points.
struct SurveyFixture {
  std::vector<SurveyResponseSet> pre;
  std::vector<SurveyResponseSet> post;
};
SurveyFixture make_survey(const InstrumentDefinition& instrument, std::size_t respondents,
                          double shift, std::uint32_t seed);

std::string read_fixture(const std::string& name);
std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& content);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace palm::testing
