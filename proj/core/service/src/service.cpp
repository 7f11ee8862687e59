#include "qmine/service.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "qmine/errors.hpp"
#include "qmine/session.hpp"

namespace qmine {

using json = nlohmann::ordered_json;

namespace {

json rule_object(const AssociationRule& r) {
  return {{"body", std::vector<Item>(r.body.begin(), r.body.end())},
          {"head", std::vector<Item>(r.head.begin(), r.head.end())},
          {"support", r.support},
          {"confidence", r.confidence.to_fixed(6)}};
}

json stats_object(const QueryStats& s) {
  return {{"query", s.query_text},         {"wall_ms", s.wall_ms},     {"sets_ms", s.sets_ms},
          {"candidates", s.candidates},
          {"db_passes", s.db_passes},      {"rules", s.rules},         {"cache_hits", s.cache_hits}};
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) { reply(res, status, {{"error", message}}); }

Ratio parse_confidence(const json& value) {
  std::string text;
  if (value.is_string()) {
    text = value.get<std::string>();
  } else if (value.is_number()) {
    text = value.dump();
  } else {
    throw ParamError("defaultConfidence must be a number or string");
  }
  const QueryExpr e = parse_query("confidence >= " + text);
  return e.atom().ratio;
}

}  // namespace

std::string rule_json(const AssociationRule& rule) { return rule_object(rule).dump(); }

struct Service::Impl {
  struct Entry {
    std::mutex mutex;
    std::unique_ptr<Session> session;
    std::chrono::system_clock::time_point created;
  };

  ServiceConfig config;
  httplib::Server server;
  std::thread worker;
  std::mutex mutex;  // guards sessions, datasets and next_id
  std::map<std::string, std::shared_ptr<Entry>> sessions;
  std::map<std::string, std::shared_ptr<const TransactionDB>> datasets;
  std::uint64_t next_id = 1;

  explicit Impl(ServiceConfig c) : config(std::move(c)) { routes(); }

  std::shared_ptr<Entry> find(const std::string& id) {
    std::lock_guard lock(mutex);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  std::shared_ptr<const TransactionDB> dataset(const json& spec) {
    if (spec.is_object() && spec.contains("inline")) {
      if (!spec["inline"].is_string()) throw ParamError("inline dataset must be a string");
      return std::make_shared<const TransactionDB>(parse_db_text(spec["inline"].get<std::string>(), "inline"));
    }
    if (!spec.is_string()) throw ParamError("dataset must be a name or {\"inline\": ...}");
    const auto name = spec.get<std::string>();
    std::lock_guard lock(mutex);
    if (auto it = datasets.find(name); it != datasets.end()) return it->second;
    auto path = config.datasets.find(name);
    if (path == config.datasets.end()) throw ParamError("unknown dataset '" + name + "'");
    auto db = std::make_shared<const TransactionDB>(load_db(path->second));
    datasets.emplace(name, db);
    return db;
  }

  void create(const httplib::Request& req, httplib::Response& res) {
    SessionConfig sc;
    std::shared_ptr<const TransactionDB> db;
    try {
      const json body = json::parse(req.body);
      if (!body.is_object() || !body.contains("dataset")) throw ParamError("missing dataset");
      db = dataset(body["dataset"]);
      if (body.contains("strategy")) {
        auto s = parse_strategy(body["strategy"].get<std::string>());
        if (!s) throw ParamError("unknown strategy");
        sc.strategy = *s;
      }
      if (body.contains("floorSupport")) {
        const auto& f = body["floorSupport"];
        if (!f.is_number_integer() || f.get<std::int64_t>() < 1) throw ParamError("floorSupport must be an integer >= 1");
        sc.floor_support = f.get<Count>();
      }
      if (body.contains("defaultConfidence")) sc.default_confidence = parse_confidence(body["defaultConfidence"]);
    } catch (const json::exception& e) {
      return fail(res, 400, e.what());
    } catch (const InfeasibleError& e) {
      return fail(res, 422, e.what());
    } catch (const Error& e) {
      return fail(res, 400, e.what());
    }
    sc.materialize_budget = config.materialize_budget;
    sc.threads = config.threads;
    sc.timeout = config.query_timeout;

    auto entry = std::make_shared<Entry>();
    entry->created = std::chrono::system_clock::now();
    try {
      entry->session = std::make_unique<Session>(db, sc);
    } catch (const InfeasibleError& e) {
      return fail(res, 422, e.what());
    } catch (const Error& e) {
      return fail(res, 400, e.what());
    }
    std::string id;
    {
      std::lock_guard lock(mutex);
      id = "s" + std::to_string(next_id++);
      sessions.emplace(id, entry);
    }
    reply(res, 201, {{"id", id}});
  }

  void query(const httplib::Request& req, httplib::Response& res) {
    auto entry = find(req.path_params.at("id"));
    if (!entry) return fail(res, 404, "unknown session");
    std::string text;
    try {
      const json body = json::parse(req.body);
      if (!body.is_object() || !body.contains("query") || !body["query"].is_string())
        return fail(res, 400, "missing query");
      text = body["query"].get<std::string>();
    } catch (const json::exception& e) {
      return fail(res, 400, e.what());
    }
    std::lock_guard lock(entry->mutex);
    try {
      const QueryAnswer answer = entry->session->run(text);
      json rules = json::array();
      for (const auto& r : answer.rules) rules.push_back(rule_object(r));
      const auto& s = answer.stats;
      reply(res, 200,
            {{"rules", rules},
             {"stats",
              {{"wall_ms", s.wall_ms}, {"sets_ms", s.sets_ms}, {"candidates", s.candidates}, {"db_passes", s.db_passes},
               {"cache_hits", s.cache_hits}, {"rules", s.rules}}}});
    } catch (const ParseError& e) {
      reply(res, 400, {{"error", e.what()}, {"offset", e.offset()}});
    } catch (const FloorViolation& e) {
      fail(res, 409, e.what());
    } catch (const Timeout& e) {
      fail(res, 504, e.what());
    } catch (const EmptyQuery& e) {
      fail(res, 400, e.what());
    } catch (const std::exception& e) {
      fail(res, 500, e.what());
    }
  }

  void stats(const httplib::Request& req, httplib::Response& res) {
    auto entry = find(req.path_params.at("id"));
    if (!entry) return fail(res, 404, "unknown session");
    std::lock_guard lock(entry->mutex);
    const Session& s = *entry->session;
    json history = json::array();
    for (const auto& h : s.history()) history.push_back(stats_object(h));
    reply(res, 200,
          {{"history", history},
           {"strategy", std::string(to_string(s.config().strategy))},
           {"cacheSize", s.cache().size()},
           {"phiSetsDisjuncts", s.cache().phi_sets().size()},
           {"materialized", s.materialized().size()},
           {"open", stats_object(s.open_stats())}});
  }

  void remove(const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<Entry> entry;
    {
      std::lock_guard lock(mutex);
      auto it = sessions.find(req.path_params.at("id"));
      if (it == sessions.end()) return fail(res, 404, "unknown session");
      entry = std::move(it->second);
      sessions.erase(it);
    }
    std::lock_guard lock(entry->mutex);  // let a running query finish first
    res.status = 204;
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Post("/sessions", [this](const auto& req, auto& res) { create(req, res); });
    server.Post("/sessions/:id/queries", [this](const auto& req, auto& res) { query(req, res); });
    server.Get("/sessions/:id/stats", [this](const auto& req, auto& res) { stats(req, res); });
    server.Delete("/sessions/:id", [this](const auto& req, auto& res) { remove(req, res); });
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace qmine
