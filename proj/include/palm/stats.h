#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "palm/types.h"

namespace palm::stats {

/// Raised for degenerate inputs (too few values, zero variance, ...).
class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Pair {
  std::string respondent_id;
  double a = 0.0;  // X_A, the pre / existing-system score
  double b = 0.0;  // X_B, the post / new-system score
};

struct PairedSample {
  std::string factor_name;
  std::vector<Pair> pairs;

  std::size_t n() const { return pairs.size(); }
  std::vector<double> differences() const;  // a - b
};

// ---- descriptive helpers -------------------------------------------------

double mean(std::span<const double> xs);
/// Unbiased (n-1) standard deviation.
double sample_sd(std::span<const double> xs);

// ---- distributions ---------------------------------------------------------

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);
/// Two-tailed p for Student's t with `df` degrees of freedom.
double student_t_two_tailed_p(double t, double df);
double normal_sf(double z);
double normal_quantile(double p);

// ---- tests -------------------------------------------------------------------

struct ShapiroResult {
  double w = 0.0;
  double p = 0.0;
};

/// Shapiro-Wilk W and p-value (Royston's AS R94 approximation).
/// Requires 3 <= n <= 5000 and a non-zero range.
ShapiroResult shapiro_wilk(std::span<const double> sample);

struct TTestResult {
  double t = 0.0;
  double p = 0.0;
  int df = 0;
};

/// Paired t-test on a - b, two-tailed.
TTestResult paired_t_test(const PairedSample& sample);

enum class WilcoxonMethod { exact, normal_approx };
const char* to_string(WilcoxonMethod m);

struct WilcoxonResult {
  double stat = 0.0;  // min(R+, R-)
  double p = 0.0;
  WilcoxonMethod method = WilcoxonMethod::exact;
  std::size_t n_effective = 0;  // after dropping zero differences
};

/// Zero differences are dropped, ties get average ranks. Exact null
/// distribution for n_effective <= 25 without ties; otherwise normal
/// approximation with tie and continuity correction.
WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample);

/// Exact two-tailed p for a statistic over ranks 1..n (no ties).
double wilcoxon_exact_p(double stat, std::size_t n);

struct EffectSize {
  double d = 0.0;          // signed d_D
  double d_abs = 0.0;      // |d_D|
  double mean_diff = 0.0;  // mean of (a - b)
  double s_d = 0.0;        // sqrt(n/(n-1) * (s_a_sq + s_b_sq - 2 s_ab))
  double s_a_sq = 0.0;     // population (divide by n) moments
  double s_b_sq = 0.0;
  double s_ab = 0.0;

  bool large() const { return d_abs > 0.8; }
};

/// Paired-sample standardized mean difference d_D = mean(D) / s_D, where
/// s_D is assembled from the population variances and covariance of the two
/// measurements. Throws StatsError when s_D is zero.
EffectSize effect_size_dd(const PairedSample& sample);

/// "***" p < 0.001, "**" p < 0.01, "*" p < 0.05, "" otherwise.
std::string stars_for(double p);

// ---- survey pipeline -------------------------------------------------------

struct FactorScoreTable {
  using Key = std::tuple<std::string, Phase, std::string>;  // respondent, phase, factor
  std::map<Key, double> scores;
  /// Respondents present in one phase only; they never enter a PairedSample.
  std::vector<std::string> excluded;
  /// Respondents with both phases, in order of first appearance.
  std::vector<std::string> paired;

  std::optional<double> get(const std::string& respondent, Phase phase,
                            const std::string& factor) const;
};

/// Per-respondent, per-phase mean of each factor's items. Throws StatsError
/// when a respondent has two rows for the same phase.
FactorScoreTable factor_scores(const std::vector<SurveyResponseSet>& responses,
                               const InstrumentDefinition& instrument);

PairedSample paired_sample(const FactorScoreTable& table, const std::string& factor);

struct TestReport {
  std::string factor_name;
  std::size_t n = 0;
  double mean_pre = 0.0, sd_pre = 0.0;
  double mean_post = 0.0, sd_post = 0.0;
  std::optional<double> shapiro_w, shapiro_p;
  bool normal = false;
  std::optional<double> t_stat, t_p;
  int df = 0;
  std::optional<double> wilcoxon_stat, wilcoxon_p;
  std::optional<WilcoxonMethod> wilcoxon_method;
  std::optional<EffectSize> effect;
  std::string stars;
  bool zero_variance = false;
  std::vector<std::string> errors;
};

struct ComparisonOptions {
  double alpha_normality = 0.05;
};

/// Per factor: descriptives, Shapiro-Wilk on the differences, paired t,
/// Wilcoxon when normality is rejected, effect size, significance stars.
/// A failing factor yields a report with `errors` set; the others proceed.
std::vector<TestReport> run_comparison(const FactorScoreTable& table,
                                       const InstrumentDefinition& instrument,
                                       const ComparisonOptions& options = {});

std::vector<TestReport> run_comparison(const std::vector<SurveyResponseSet>& pre,
                                       const std::vector<SurveyResponseSet>& post,
                                       const InstrumentDefinition& instrument,
                                       const ComparisonOptions& options = {});

/// Table with columns factor | pre mean (SD) | post mean (SD) | t | |d_D|.
std::string render_markdown(const std::vector<TestReport>& reports, const std::string& pre_label = "pre",
                            const std::string& post_label = "post");

}  // namespace palm::stats
