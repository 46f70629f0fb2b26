#include "palm/stats.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include <boost/math/distributions/normal.hpp>

namespace palm::stats {

std::vector<double> PairedSample::differences() const {
  std::vector<double> d;
  d.reserve(pairs.size());
  for (const auto& p : pairs) d.push_back(p.a - p.b);
  return d;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw StatsError("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) throw StatsError("standard deviation needs at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// ---------------------------------------------------------------------------
// Distributions

namespace {

// Continued fraction for I_x(a,b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 1000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a,b) given both x and y = 1 - x, so callers can pass an accurate y.
double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw StatsError("incomplete beta needs a, b > 0");
  if (x < 0.0 || x > 1.0) throw StatsError("incomplete beta needs x in [0,1]");
  return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw StatsError("t distribution needs df > 0");
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  return std::clamp(incomplete_beta(0.5 * df, 0.5, x, y), 0.0, 1.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk

namespace {

double poly(std::span<const double> c, double x) {
  // c[0] + c[1] x + ... + c[k] x^k
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
  return r;
}

}  // namespace

ShapiroResult shapiro_wilk(std::span<const double> sample) {
  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
  static constexpr double g[] = {-2.273, 0.459};

  const std::size_t n = sample.size();
  if (n < 3 || n > 5000) throw StatsError("shapiro_wilk needs 3 <= n <= 5000");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 0.0)) throw StatsError("shapiro_wilk: zero variance (all values identical)");

  const double an = static_cast<double>(n);
  const std::size_t half = n / 2;
  std::vector<double> a(half + 1, 0.0);  // 1-based half-coefficients
  if (n == 3) {
    a[1] = std::sqrt(0.5);
  } else {
    std::vector<double> m(half + 1, 0.0);
    double summ2 = 0.0;
    for (std::size_t i = 1; i <= half; ++i) {
      m[i] = normal_quantile((static_cast<double>(i) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, rsn) - m[1] / ssumm2;
    std::size_t first;
    double fac;
    if (n > 5) {
      first = 3;
      const double a2 = -m[2] / ssumm2 + poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[1] * m[1] - 2.0 * m[2] * m[2]) /
                      (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[2] = a2;
    } else {
      first = 2;
      fac = std::sqrt((summ2 - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1));
    }
    a[1] = a1;
    for (std::size_t i = first; i <= half; ++i) a[i] = -m[i] / fac;
  }

  // W as the squared correlation between the scaled order statistics and the
  // antisymmetric coefficient vector; computing 1 - W directly keeps precision
  // when W is close to 1.
  std::vector<double> coef(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    coef[i] = -a[i + 1];
    coef[n - 1 - i] = a[i + 1];
  }
  const double sa = std::accumulate(coef.begin(), coef.end(), 0.0) / an;
  double sx = 0.0;
  for (double v : x) sx += v / range;
  sx /= an;
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double asa = coef[i] - sa;
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  ShapiroResult res;
  res.w = 1.0 - w1;

  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;   // 6 / pi
    constexpr double stqr = 1.04719755119660;  // asin(sqrt(3/4))
    res.p = std::max(0.0, pi6 * (std::asin(std::sqrt(res.w)) - stqr));
    return res;
  }
  double y = std::log(w1);
  const double xx = std::log(an);
  double mu, sigma;
  if (n <= 11) {
    const double gamma = poly(g, an);
    if (y >= gamma) {
      res.p = 1e-99;
      return res;
    }
    y = -std::log(gamma - y);
    mu = poly(c3, an);
    sigma = std::exp(poly(c4, an));
  } else {
    mu = poly(c5, xx);
    sigma = std::exp(poly(c6, xx));
  }
  res.p = normal_sf((y - mu) / sigma);
  return res;
}

// ---------------------------------------------------------------------------
// Paired t

namespace {

bool all_equal(std::span<const double> xs) {
  return std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) == xs.end();
}

}  // namespace

TTestResult paired_t_test(const PairedSample& sample) {
  const std::size_t n = sample.n();
  if (n < 2) throw StatsError("paired t-test needs at least 2 pairs");
  const auto d = sample.differences();
  if (all_equal(d)) throw StatsError("paired t-test: zero-variance differences");
  const double sd = sample_sd(d);
  const double dbar = mean(d);
  TTestResult r;
  r.df = static_cast<int>(n - 1);
  r.t = dbar / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_tailed_p(r.t, r.df);
  return r;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank

const char* to_string(WilcoxonMethod m) {
  return m == WilcoxonMethod::exact ? "exact" : "normal_approx";
}

double wilcoxon_exact_p(double stat, std::size_t n) {
  // counts[s] = number of subsets of {1..n} whose rank sum is s.
  const std::size_t max_sum = n * (n + 1) / 2;
  std::vector<double> counts(max_sum + 1, 0.0);
  counts[0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t s = max_sum; s >= r; --s) counts[s] += counts[s - r];
  const double t = std::min(stat, static_cast<double>(max_sum) - stat);
  double tail = 0.0;
  for (std::size_t s = 0; static_cast<double>(s) <= t; ++s) tail += counts[s];
  return std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
}

WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample) {
  std::vector<double> d;
  for (double v : sample.differences())
    if (v != 0.0) d.push_back(v);
  if (d.empty()) throw StatsError("wilcoxon: all differences are zero");
  const std::size_t n = d.size();
  if (n < 3) throw StatsError("wilcoxon needs at least 3 non-zero differences");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return std::fabs(d[i]) < std::fabs(d[j]); });
  std::vector<double> rank(n);
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(d[order[j + 1]]) == std::fabs(d[order[i]])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1) {
      ties = true;
      tie_term += t * t * t - t;
    }
    i = j + 1;
  }
  double r_plus = 0.0, r_minus = 0.0;
  for (std::size_t i = 0; i < n; ++i) (d[i] > 0 ? r_plus : r_minus) += rank[i];

  WilcoxonResult res;
  res.n_effective = n;
  res.stat = std::min(r_plus, r_minus);
  if (n <= 25 && !ties) {
    res.method = WilcoxonMethod::exact;
    res.p = wilcoxon_exact_p(res.stat, n);
    return res;
  }
  res.method = WilcoxonMethod::normal_approx;
  const double nn = static_cast<double>(n);
  const double mn = nn * (nn + 1.0) / 4.0;
  const double se = std::sqrt(nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0);
  double z = (r_plus - mn) / se;
  if (z > 0)
    z -= 0.5 / se;
  else if (z < 0)
    z += 0.5 / se;
  res.p = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
  return res;
}

// ---------------------------------------------------------------------------
// Effect size

EffectSize effect_size_dd(const PairedSample& sample) {
  const std::size_t n = sample.n();
  if (n < 2) throw StatsError("effect size needs at least 2 pairs");
  const double nn = static_cast<double>(n);
  double ma = 0.0, mb = 0.0;
  for (const auto& p : sample.pairs) {
    ma += p.a;
    mb += p.b;
  }
  ma /= nn;
  mb /= nn;
  EffectSize e;
  for (const auto& p : sample.pairs) {
    e.s_a_sq += (p.a - ma) * (p.a - ma);
    e.s_b_sq += (p.b - mb) * (p.b - mb);
    e.s_ab += (p.a - ma) * (p.b - mb);
  }
  e.s_a_sq /= nn;
  e.s_b_sq /= nn;
  e.s_ab /= nn;

  const auto diffs = sample.differences();
  e.mean_diff = mean(diffs);
  const double var = nn / (nn - 1.0) * (e.s_a_sq + e.s_b_sq - 2.0 * e.s_ab);
  if (all_equal(diffs) || !(var > 0.0))
    throw StatsError("effect size: zero standard deviation of differences");
  e.s_d = std::sqrt(var);
  e.d = e.mean_diff / e.s_d;
  e.d_abs = std::fabs(e.d);
  return e;
}

std::string stars_for(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

// ---------------------------------------------------------------------------
// Survey pipeline

std::optional<double> FactorScoreTable::get(const std::string& respondent, Phase phase,
                                            const std::string& factor) const {
  auto it = scores.find({respondent, phase, factor});
  if (it == scores.end()) return std::nullopt;
  return it->second;
}

FactorScoreTable factor_scores(const std::vector<SurveyResponseSet>& responses,
                               const InstrumentDefinition& instrument) {
  FactorScoreTable table;
  std::map<std::string, std::set<Phase>> phases;
  std::vector<std::string> order;
  for (const auto& r : responses) {
    auto& seen = phases[r.respondent_id];
    if (seen.empty()) order.push_back(r.respondent_id);
    if (!seen.insert(r.phase).second)
      throw StatsError("respondent `" + r.respondent_id + "` has duplicate `" +
                       to_string(r.phase) + "` rows");
    std::map<std::string, int> values;
    for (const auto& a : r.answers) values[a.item_id] = a.value;
    for (const auto& f : instrument.factors) {
      double sum = 0.0;
      for (const auto& item : f.item_ids) {
        auto it = values.find(item);
        if (it == values.end())
          throw StatsError("respondent `" + r.respondent_id + "` lacks item `" + item + "`");
        sum += it->second;
      }
      table.scores[{r.respondent_id, r.phase, f.name}] = sum / static_cast<double>(f.item_ids.size());
    }
  }
  for (const auto& id : order)
    (phases[id].size() == 2 ? table.paired : table.excluded).push_back(id);
  return table;
}

PairedSample paired_sample(const FactorScoreTable& table, const std::string& factor) {
  PairedSample s{factor, {}};
  for (const auto& id : table.paired) {
    auto a = table.get(id, Phase::pre, factor);
    auto b = table.get(id, Phase::post, factor);
    if (a && b) s.pairs.push_back({id, *a, *b});
  }
  return s;
}

std::vector<TestReport> run_comparison(const FactorScoreTable& table,
                                       const InstrumentDefinition& instrument,
                                       const ComparisonOptions& options) {
  std::vector<TestReport> reports;
  for (const auto& factor : instrument.factors) {
    TestReport r;
    r.factor_name = factor.name;
    const PairedSample sample = paired_sample(table, factor.name);
    r.n = sample.n();
    auto fail = [&](const std::exception& e) { r.errors.emplace_back(e.what()); };

    std::vector<double> pre, post;
    for (const auto& p : sample.pairs) {
      pre.push_back(p.a);
      post.push_back(p.b);
    }
    if (r.n == 0) {
      r.errors.emplace_back("no paired respondents");
      reports.push_back(std::move(r));
      continue;
    }
    r.mean_pre = mean(pre);
    r.mean_post = mean(post);
    if (r.n >= 2) {
      r.sd_pre = sample_sd(pre);
      r.sd_post = sample_sd(post);
    }
    const auto diffs = sample.differences();
    r.zero_variance = all_equal(diffs);

    try {
      auto sw = shapiro_wilk(diffs);
      r.shapiro_w = sw.w;
      r.shapiro_p = sw.p;
      r.normal = sw.p >= options.alpha_normality;
    } catch (const StatsError& e) {
      fail(e);
    }
    try {
      auto t = paired_t_test(sample);
      r.t_stat = t.t;
      r.t_p = t.p;
      r.df = t.df;
      r.stars = stars_for(t.p);
    } catch (const StatsError& e) {
      fail(e);
    }
    if (!r.normal && !r.zero_variance) {
      try {
        auto w = wilcoxon_signed_rank(sample);
        r.wilcoxon_stat = w.stat;
        r.wilcoxon_p = w.p;
        r.wilcoxon_method = w.method;
      } catch (const StatsError& e) {
        fail(e);
      }
    }
    try {
      r.effect = effect_size_dd(sample);
    } catch (const StatsError& e) {
      fail(e);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<TestReport> run_comparison(const std::vector<SurveyResponseSet>& pre,
                                       const std::vector<SurveyResponseSet>& post,
                                       const InstrumentDefinition& instrument,
                                       const ComparisonOptions& options) {
  for (const auto& r : pre)
    if (r.phase != Phase::pre) throw StatsError("pre responses contain a `post` row");
  for (const auto& r : post)
    if (r.phase != Phase::post) throw StatsError("post responses contain a `pre` row");
  std::vector<SurveyResponseSet> all(pre);
  all.insert(all.end(), post.begin(), post.end());
  return run_comparison(factor_scores(all, instrument), instrument, options);
}

std::string render_markdown(const std::vector<TestReport>& reports, const std::string& pre_label,
                            const std::string& post_label) {
  auto fmt = [](const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return std::string(buf);
  };
  std::string out = "| Factor | " + pre_label + " mean (SD) | " + post_label +
                    " mean (SD) | t | \\|d_D\\| |\n|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    out += "| " + r.factor_name + " | ";
    out += fmt("%.1f", r.mean_pre) + " (" + fmt("%.2f", r.sd_pre) + ") | ";
    out += fmt("%.1f", r.mean_post) + " (" + fmt("%.2f", r.sd_post) + ") | ";
    std::string stars;
    for (char c : r.stars) stars += std::string("\\") + c;
    out += r.t_stat ? fmt("%.1f", *r.t_stat) + stars : std::string("n/a");
    out += " | ";
    out += r.effect ? fmt("%.2f", r.effect->d_abs) : std::string("n/a");
    out += " |\n";
  }
  return out;
}

}  // namespace palm::stats
