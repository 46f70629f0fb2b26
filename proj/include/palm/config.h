#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "palm/map_composer.h"

namespace palm {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path store_path = "store";
  std::string admin_token;  // empty disables POST /api/v1/ingest
  relevance::RenderPolicy policy;
  relevance::TokenizeMode tokenizer = relevance::TokenizeMode::auto_detect;
  engagement::CohortPolicy cohort;
  std::optional<std::filesystem::path> grade_scale_path;
  std::vector<std::string> cors_allowed_origins;
  double alpha_normality = 0.05;

  /// ComposeConfig for snapshots, with the given grade scale.
  composer::ComposeConfig compose_config(const GradeScale& scale) const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads `key = value` lines (`#` comments, optional `[section]` headers and
/// quoted values). Throws ValidationError naming the line on bad input.
ServiceConfig parse_config(std::string_view text);

/// File (when given) then environment: PALM_STORE, PALM_PORT, PALM_ADMIN_TOKEN.
ServiceConfig load_config(const std::optional<std::filesystem::path>& path,
                          const EnvLookup& env = {});

std::optional<std::string> process_env(const std::string& name);

}  // namespace palm
