#include "palm/api_server.h"

#include <fstream>
#include <sstream>

#include "httplib.h"
#include "palm/service.h"
#include "palm/text_util.h"

namespace palm {

using nlohmann::ordered_json;
using engagement::DisplaySettings;

namespace {

class BadRequest : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ordered_json snapshot_ref(const std::shared_ptr<const composer::MapSnapshot>& snap) {
  return snap ? ordered_json(snap->snapshot_id) : ordered_json(nullptr);
}

void send_json(httplib::Response& res, int status, ordered_json body,
               const std::shared_ptr<const composer::MapSnapshot>& snap) {
  if (!body.contains("snapshot_id")) {
    ordered_json wrapped;
    wrapped["snapshot_id"] = snapshot_ref(snap);
    for (auto& [k, v] : body.items()) wrapped[k] = std::move(v);
    body = std::move(wrapped);
  }
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::shared_ptr<const composer::MapSnapshot>& snap,
                ordered_json details = nullptr) {
  ordered_json body;
  body["snapshot_id"] = snapshot_ref(snap);
  body["error"] = message;
  if (!details.is_null()) body["details"] = std::move(details);
  send_json(res, status, std::move(body), snap);
}

std::vector<std::string> list_param(const std::string& v) {
  std::vector<std::string> out;
  for (const auto& part : text::split(v, ','))
    if (auto t = text::trim(part); !t.empty()) out.emplace_back(t);
  return out;
}

DisplaySettings settings_from(const httplib::Request& req) {
  DisplaySettings s;
  if (req.has_param("layers")) {
    s.show_layers.clear();
    for (const auto& name : list_param(req.get_param_value("layers"))) {
      auto l = engagement::layer_from_string(name);
      if (!l) throw BadRequest("unknown layer `" + name + "`");
      s.show_layers.insert(*l);
    }
  }
  if (req.has_param("metrics")) {
    s.metrics_included.clear();
    for (const auto& name : list_param(req.get_param_value("metrics"))) {
      auto m = metric_from_string(name);
      if (!m) throw BadRequest("unknown metric `" + name + "`");
      s.metrics_included.insert(*m);
    }
  }
  if (req.has_param("grade_mode")) {
    auto g = engagement::grade_mode_from_string(req.get_param_value("grade_mode"));
    if (!g) throw BadRequest("unknown grade_mode `" + req.get_param_value("grade_mode") + "`");
    s.grade_mode = *g;
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw BadRequest(e.what());
  }
  return s;
}

std::optional<std::string> student_from(const httplib::Request& req) {
  if (!req.has_param("student")) return std::nullopt;
  auto s = req.get_param_value("student");
  if (s.empty()) return std::nullopt;
  return s;
}

bool authorized(const httplib::Request& req, const std::string& token) {
  if (token.empty()) return false;
  if (req.get_header_value("X-Admin-Token") == token) return true;
  return req.get_header_value("Authorization") == "Bearer " + token;
}

std::optional<GradeScale> configured_scale(const ServiceConfig& config) {
  if (!config.grade_scale_path) return std::nullopt;
  std::ifstream in(*config.grade_scale_path);
  if (!in) throw std::runtime_error("cannot read grade scale " + config.grade_scale_path->string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ingestion::parse_grade_scale(ss.str());
}

}  // namespace

ApiServer::ApiServer(ServiceConfig config, SnapshotStore& store)
    : config_(std::move(config)), store_(store), server_(std::make_unique<httplib::Server>()) {
  routes();
}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return server_->listen_after_bind(); }

void ApiServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

void ApiServer::wait_until_ready() const { server_->wait_until_ready(); }

void ApiServer::routes() {
  auto& srv = *server_;

  srv.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const auto origin = req.get_header_value("Origin");
    if (origin.empty()) return;
    for (const auto& allowed : config_.cors_allowed_origins) {
      if (allowed == "*" || allowed == origin) {
        res.set_header("Access-Control-Allow-Origin", allowed == "*" ? "*" : origin);
        res.set_header("Vary", "Origin");
        break;
      }
    }
  });
  srv.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization, X-Admin-Token");
    res.status = 204;
  });

  srv.Get("/api/v1/map", [this](const httplib::Request& req, httplib::Response& res) {
    auto snap = store_.current();
    if (!snap) return send_error(res, 503, "no snapshot published", snap);
    try {
      auto settings = settings_from(req);
      auto view = composer::view(*snap, student_from(req), settings);
      send_json(res, 200, composer::to_json(view), snap);
    } catch (const BadRequest& e) {
      send_error(res, 400, e.what(), snap);
    }
  });

  srv.Get(R"(/api/v1/courses/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto snap = store_.current();
    if (!snap) return send_error(res, 503, "no snapshot published", snap);
    try {
      auto settings = settings_from(req);
      auto card = engagement::hover_payload(composer::hover_sources(*snap), req.matches[1].str(),
                                            student_from(req), settings);
      send_json(res, 200, engagement::to_json(card), snap);
    } catch (const BadRequest& e) {
      send_error(res, 400, e.what(), snap);
    } catch (const engagement::NotFoundError& e) {
      send_error(res, 404, e.what(), snap);
    }
  });

  srv.Post("/api/v1/ingest", [this](const httplib::Request& req, httplib::Response& res) {
    if (!authorized(req, config_.admin_token))
      return send_error(res, 401, "admin token required", store_.current());
    if (!req.has_file("layout"))
      return send_error(res, 400, "multipart field `layout` is required", store_.current());

    service::IngestInputs in;
    in.layout = req.get_file_value("layout").content;
    if (req.has_file("engagement")) in.engagement = req.get_file_value("engagement").content;
    if (req.has_file("grades")) in.grades = req.get_file_value("grades").content;
    if (req.has_file("grade_scale")) in.grade_scale = req.get_file_value("grade_scale").content;

    std::lock_guard lock(store_.writer_mutex());
    try {
      auto parsed = service::parse_inputs(in, configured_scale(config_));
      auto snap = service::compute_snapshot(parsed, config_);
      auto summary = service::ingest_summary(parsed, &snap);
      store_.publish(std::move(snap));
      send_json(res, 201, std::move(summary), store_.current());
    } catch (const service::IngestRejected& e) {
      send_error(res, 422, "validation failed", store_.current(),
                 service::problems_to_json(e.problems()));
    } catch (const ValidationError& e) {
      send_error(res, 422, e.what(), store_.current());
    }
  });

  srv.Post("/api/v1/analyze/survey", [this](const httplib::Request& req, httplib::Response& res) {
    auto snap = store_.current();
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error&) {
      return send_error(res, 400, "body must be JSON {instrument, pre, post}", snap);
    }
    if (!body.is_object() || !body.contains("pre") || !body.contains("post") ||
        !body["pre"].is_string() || !body["post"].is_string() || !body.contains("instrument"))
      return send_error(res, 400, "body must be JSON {instrument, pre, post}", snap);

    InstrumentDefinition instrument;
    try {
      const auto& ins = body["instrument"];
      if (ins.is_string()) {
        auto preset = service::preset_instrument(ins.get<std::string>());
        if (!preset) return send_error(res, 400, "unknown instrument `" + ins.get<std::string>() + "`", snap);
        instrument = *preset;
      } else {
        instrument = ingestion::parse_instrument(ins.dump());
      }
    } catch (const ValidationError& e) {
      return send_error(res, 400, std::string("instrument: ") + e.what(), snap);
    }
    double alpha = config_.alpha_normality;
    if (body.contains("alpha_normality")) {
      if (!body["alpha_normality"].is_number())
        return send_error(res, 400, "alpha_normality must be a number", snap);
      alpha = body["alpha_normality"].get<double>();
    }
    try {
      auto analysis = service::analyze_survey(body["pre"].get<std::string>(),
                                              body["post"].get<std::string>(), instrument, alpha);
      send_json(res, 200, service::to_json(analysis), snap);
    } catch (const service::IngestRejected& e) {
      send_error(res, 422, "validation failed", snap, service::problems_to_json(e.problems()));
    }
  });

  srv.set_exception_handler([this](const httplib::Request&, httplib::Response& res,
                                   std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send_error(res, 500, what, store_.current());
  });
}

}  // namespace palm
