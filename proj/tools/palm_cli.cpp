// palm: command-line front end.
//
//   palm ingest  --layout L --engagement E --grades G --grade-scale S [--store DIR]
//   palm compute [--store DIR]
//   palm serve   [--port N] [--host H] [--store DIR]
//   palm analyze --instrument tpb|lads|file.json --pre a.csv --post b.csv [--format md|json]
//   palm export-graph [--store DIR | --layout L] [--out FILE]
//
// Exit status: 0 success, 2 validation error, 1 internal error.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "palm/api_server.h"
#include "palm/config.h"
#include "palm/service.h"
#include "palm/snapshot_store.h"

namespace fs = std::filesystem;
using namespace palm;

namespace {

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kValidation = 2;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError(p.string(), "cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

fs::path staging_dir(const ServiceConfig& config) { return config.store_path / "inputs"; }

std::optional<GradeScale> configured_scale(const ServiceConfig& config) {
  if (!config.grade_scale_path) return std::nullopt;
  return ingestion::parse_grade_scale(read_file(*config.grade_scale_path));
}

void print_problems(const service::IngestRejected& e) {
  std::cerr << "validation failed:\n";
  for (const auto& p : e.problems())
    std::cerr << "  " << p.file << (p.location.empty() ? "" : " " + p.location) << " [" << p.kind
              << "] " << p.message << "\n";
}

ApiServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curriculum map learning-analytics service"};
  app.require_subcommand(1);

  std::string config_path;
  std::string store_override;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--store", store_override, "snapshot store directory (overrides config)");

  auto* ingest = app.add_subcommand("ingest", "validate data files and stage them for compute");
  std::string layout_path, engagement_path, grades_path, scale_path;
  ingest->add_option("--layout", layout_path, "layout.json")->required();
  ingest->add_option("--engagement", engagement_path, "engagement.csv");
  ingest->add_option("--grades", grades_path, "grades.csv");
  ingest->add_option("--grade-scale", scale_path, "grade_scale.json");

  auto* compute = app.add_subcommand("compute", "build the relevance graph and publish a snapshot");
  std::string created_at;
  compute->add_option("--created-at", created_at, "timestamp recorded in the snapshot");

  auto* serve = app.add_subcommand("serve", "serve the current snapshot over HTTP");
  int port = -1;
  std::string host;
  serve->add_option("--port", port, "listen port (0 = ephemeral)");
  serve->add_option("--host", host, "listen address");

  auto* analyze = app.add_subcommand("analyze", "pre/post survey comparison");
  std::string instrument_name, pre_path, post_path, format = "md";
  double alpha = -1;
  analyze->add_option("--instrument", instrument_name, "tpb, lads or an instrument JSON file")
      ->required();
  analyze->add_option("--pre", pre_path, "pre-phase survey CSV")->required();
  analyze->add_option("--post", post_path, "post-phase survey CSV")->required();
  analyze->add_option("--format", format, "md or json")->check(CLI::IsMember({"md", "json"}));
  analyze->add_option("--alpha", alpha, "Shapiro-Wilk significance level");

  auto* export_graph = app.add_subcommand("export-graph", "write the relevance graph JSON");
  std::string export_layout, out_path;
  double min_similarity = -1;
  int top_k = -1;
  export_graph->add_option("--layout", export_layout, "compute from this layout instead of the store");
  export_graph->add_option("--out", out_path, "output file (default stdout)");
  export_graph->add_option("--min-similarity", min_similarity, "override the configured threshold");
  export_graph->add_option("--top-k", top_k, "override the configured per-course limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    ServiceConfig config =
        load_config(config_path.empty() ? std::nullopt : std::optional<fs::path>(config_path));
    if (!store_override.empty()) config.store_path = store_override;

    if (*ingest) {
      service::IngestInputs in;
      in.layout = read_file(layout_path);
      if (!engagement_path.empty()) in.engagement = read_file(engagement_path);
      if (!grades_path.empty()) in.grades = read_file(grades_path);
      if (!scale_path.empty()) in.grade_scale = read_file(scale_path);
      auto parsed = service::parse_inputs(in, configured_scale(config));

      SnapshotStore store(config.store_path);
      const fs::path dir = staging_dir(config);
      fs::create_directories(dir);
      write_file(dir / "layout.json", ingestion::serialize_layout(parsed.layout));
      write_file(dir / "engagement.csv", ingestion::serialize_engagement_csv(parsed.engagement.records));
      write_file(dir / "grades.csv", ingestion::serialize_grades_csv(parsed.grades.records));
      write_file(dir / "grade_scale.json", ingestion::serialize_grade_scale(parsed.scale));
      std::cout << service::ingest_summary(parsed, nullptr).dump(2) << "\n";
      return kOk;
    }

    if (*compute) {
      const fs::path dir = staging_dir(config);
      if (!fs::exists(dir / "layout.json"))
        throw ValidationError(dir.string(), "nothing staged; run `ingest` first");
      service::IngestInputs in;
      in.layout = read_file(dir / "layout.json");
      in.engagement = read_file(dir / "engagement.csv");
      in.grades = read_file(dir / "grades.csv");
      in.grade_scale = read_file(dir / "grade_scale.json");
      auto parsed = service::parse_inputs(in, std::nullopt);
      SnapshotStore store(config.store_path);
      std::lock_guard lock(store.writer_mutex());
      auto snap = service::compute_snapshot(parsed, config, created_at);
      auto summary = service::ingest_summary(parsed, &snap);
      store.publish(std::move(snap));
      std::cout << summary.dump(2) << "\n";
      return kOk;
    }

    if (*serve) {
      if (port >= 0) config.listen_port = port;
      if (!host.empty()) config.host = host;
      SnapshotStore store(config.store_path);
      if (!store.load_current())
        std::cerr << "warning: no snapshot in " << config.store_path << "; /map returns 503\n";
      ApiServer server(config, store);
      int bound = server.bind(config.host, config.listen_port);
      if (bound < 0) {
        std::cerr << "cannot bind " << config.host << ":" << config.listen_port << "\n";
        return kInternal;
      }
      std::cout << "listening on http://" << config.host << ":" << bound << std::endl;
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      server.listen();
      g_server = nullptr;
      return kOk;
    }

    if (*analyze) {
      InstrumentDefinition instrument;
      if (auto preset = service::preset_instrument(instrument_name))
        instrument = *preset;
      else
        instrument = ingestion::parse_instrument(read_file(instrument_name));
      auto analysis = service::analyze_survey(read_file(pre_path), read_file(post_path), instrument,
                                              alpha >= 0 ? alpha : config.alpha_normality);
      if (format == "json") {
        std::cout << service::to_json(analysis).dump(2) << "\n";
      } else {
        std::cout << stats::render_markdown(analysis.reports);
        if (!analysis.excluded_respondents.empty()) {
          std::cout << "\nExcluded (unpaired):";
          for (const auto& id : analysis.excluded_respondents) std::cout << " " << id;
          std::cout << "\n";
        }
      }
      return kOk;
    }

    if (*export_graph) {
      relevance::RelevanceGraph graph;
      auto policy = config.policy;
      if (min_similarity >= 0) policy.min_similarity = min_similarity;
      if (top_k >= 0) policy.top_k = static_cast<std::size_t>(top_k);
      if (!export_layout.empty()) {
        auto layout = ingestion::parse_layout(read_file(export_layout));
        relevance::TfidfOptions opts;
        opts.mode = config.tokenizer;
        graph = relevance::build_graph(relevance::build_tfidf(layout, opts), policy);
      } else {
        SnapshotStore store(config.store_path);
        auto snap = store.load_current();
        if (!snap) throw ValidationError(config.store_path.string(), "no snapshot published");
        graph = snap->layer1;
        if (min_similarity >= 0 || top_k >= 0) {
          relevance::TfidfOptions opts;
          opts.mode = snap->config.tokenizer;
          graph = relevance::build_graph(relevance::build_tfidf(snap->layout, opts), policy);
        }
      }
      const std::string doc = relevance::graph_to_json(graph);
      if (out_path.empty())
        std::cout << doc;
      else
        write_file(out_path, doc);
      return kOk;
    }
  } catch (const service::IngestRejected& e) {
    print_problems(e);
    return kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const stats::StatsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
