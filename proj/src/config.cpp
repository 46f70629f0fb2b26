#include "palm/config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "palm/text_util.h"

namespace palm {

composer::ComposeConfig ServiceConfig::compose_config(const GradeScale& scale) const {
  return composer::ComposeConfig{policy, tokenizer, cohort, scale};
}

namespace {

template <typename T>
T number(const std::string& v, const std::string& loc) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ValidationError(loc, "not a number: `" + v + "`");
  return out;
}

bool boolean(const std::string& v, const std::string& loc) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError(loc, "not a boolean: `" + v + "`");
}

void apply(ServiceConfig& c, const std::string& key, const std::string& value,
           const std::string& loc) {
  auto optional_int = [&]() -> std::optional<int> {
    if (value.empty() || value == "none") return std::nullopt;
    return number<int>(value, loc);
  };
  if (key == "host") {
    c.host = value;
  } else if (key == "port" || key == "listen_port") {
    c.listen_port = number<int>(value, loc);
    if (c.listen_port < 0 || c.listen_port > 65535) throw ValidationError(loc, "port out of range");
  } else if (key == "store" || key == "store_path") {
    c.store_path = value;
  } else if (key == "admin_token") {
    c.admin_token = value;
  } else if (key == "min_similarity") {
    c.policy.min_similarity = number<double>(value, loc);
  } else if (key == "top_k") {
    if (value.empty() || value == "none")
      c.policy.top_k.reset();
    else
      c.policy.top_k = number<std::size_t>(value, loc);
  } else if (key == "tokenizer") {
    auto m = relevance::tokenize_mode_from_string(value);
    if (!m) throw ValidationError(loc, "unknown tokenizer `" + value + "`");
    c.tokenizer = *m;
  } else if (key == "cohort_before_viewer") {
    c.cohort.before_viewer = boolean(value, loc);
  } else if (key == "cohort_min_year") {
    c.cohort.min_year = optional_int();
  } else if (key == "cohort_max_year") {
    c.cohort.max_year = optional_int();
  } else if (key == "min_cohort_n") {
    c.cohort.min_contributors = number<std::size_t>(value, loc);
  } else if (key == "grade_scale") {
    c.grade_scale_path = value;
  } else if (key == "cors_allowed_origins") {
    c.cors_allowed_origins.clear();
    for (const auto& o : text::split(value, ','))
      if (auto t = text::trim(o); !t.empty()) c.cors_allowed_origins.emplace_back(t);
  } else if (key == "alpha_normality") {
    c.alpha_normality = number<double>(value, loc);
  } else {
    throw ValidationError(loc, "unknown key `" + key + "`");
  }
}

}  // namespace

ServiceConfig parse_config(std::string_view text) {
  ServiceConfig c;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(text, '\n')) {
    ++line_no;
    std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == '[') continue;
    const std::string loc = "line " + std::to_string(line_no);
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ValidationError(loc, "expected `key = value`");
    std::string key(text::trim(line.substr(0, eq)));
    std::string_view value = text::trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"') {
      auto close = value.find('"', 1);
      if (close == std::string_view::npos) throw ValidationError(loc, "unterminated string");
      value = value.substr(1, close - 1);
    } else if (auto hash = value.find(" #"); hash != std::string_view::npos) {
      value = text::trim(value.substr(0, hash));
    }
    apply(c, key, std::string(value), loc);
  }
  return c;
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

ServiceConfig load_config(const std::optional<std::filesystem::path>& path, const EnvLookup& env) {
  ServiceConfig c;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ValidationError(path->string(), "cannot read config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      c = parse_config(ss.str());
    } catch (const ValidationError& e) {
      throw ValidationError(path->string() + " " + e.location(), e.detail());
    }
    // Relative paths in the config file resolve against its directory.
    auto base = path->parent_path();
    if (c.grade_scale_path && c.grade_scale_path->is_relative())
      c.grade_scale_path = base / *c.grade_scale_path;
  }
  const EnvLookup lookup = env ? env : EnvLookup(process_env);
  if (auto v = lookup("PALM_STORE")) c.store_path = *v;
  if (auto v = lookup("PALM_PORT")) apply(c, "port", *v, "PALM_PORT");
  if (auto v = lookup("PALM_ADMIN_TOKEN")) c.admin_token = *v;
  return c;
}

}  // namespace palm
