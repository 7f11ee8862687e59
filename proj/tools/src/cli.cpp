#include "qmine/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "qmine/errors.hpp"
#include "qmine/service.hpp"
#include "qmine/session.hpp"
#include "qmine/workload.hpp"

namespace qmine {

namespace {

struct SessionFlags {
  std::string data;
  std::string strategy = "integrated";
  Count floor = 1;
  std::string default_confidence = "0";
  unsigned threads = 1;

  void add_to(CLI::App* cmd, bool need_data = true) {
    auto* opt = cmd->add_option("--data", data, "Transaction file, one basket per line");
    if (need_data) opt->required();
    cmd->add_option("--strategy", strategy, "integrated|post|incremental")
        ->check(CLI::IsMember({"integrated", "post", "postprocess", "incremental"}));
    cmd->add_option("--floor-support", floor, "Lowest support threshold of the session")->check(CLI::PositiveNumber);
    cmd->add_option("--default-confidence", default_confidence, "Confidence for queries without one (0.5 or 50%)");
    cmd->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  }

  [[nodiscard]] SessionConfig config() const {
    SessionConfig c;
    c.strategy = *parse_strategy(strategy);
    c.floor_support = floor;
    c.default_confidence = parse_query("confidence >= " + default_confidence).atom().ratio;
    c.threads = threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : threads;
    return c;
  }
};

void print_rules(const std::vector<AssociationRule>& rules, const std::string& format, std::ostream& out) {
  for (const auto& r : rules) out << (format == "jsonl" ? rule_json(r) : format_rule(r)) << '\n';
}

std::string stats_line(const QueryStats& s) {
  std::ostringstream line;
  line << "# " << s.rules << " rules, wall_ms=" << std::fixed << std::setprecision(3) << s.wall_ms
       << ", candidates=" << s.candidates << ", db_passes=" << s.db_passes << ", cache_hits=" << s.cache_hits;
  return line.str();
}

int error_code(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e)) return kExitIo;
  return kExitQuery;
}

int cmd_run(const SessionFlags& flags, const std::string& query, const std::string& format, std::ostream& out,
            std::ostream& err) {
  try {
    auto db = std::make_shared<const TransactionDB>(load_db(flags.data));
    Session session(db, flags.config());
    const QueryAnswer answer = session.run(query);
    print_rules(answer.rules, format, out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return error_code(e);
  }
}

void repl_meta(Session& session, const std::string& line, std::ostream& out) {
  std::istringstream words(line);
  std::string cmd;
  std::string arg;
  words >> cmd >> arg;
  if (cmd == ":stats") {
    if (session.config().strategy == Strategy::postprocess) out << "(materialize) " << stats_line(session.open_stats()) << '\n';
    std::size_t i = 0;
    for (const auto& s : session.history()) out << ++i << ": " << s.query_text << ' ' << stats_line(s) << '\n';
  } else if (cmd == ":cache") {
    out << "cache: " << session.cache().size() << " itemsets, " << session.cache().phi_sets().size()
        << " phi_sets disjuncts\n";
  } else if (cmd == ":save") {
    std::ofstream file(arg);
    if (!file) throw IoError("cannot write " + arg);
    session.cache().save(file);
    out << "saved " << session.cache().size() << " itemsets to " << arg << '\n';
  } else if (cmd == ":load") {
    std::ifstream file(arg);
    if (!file) throw IoError("cannot open " + arg);
    session.cache() = KnowledgeCache::load(file);
    out << "loaded " << session.cache().size() << " itemsets from " << arg << '\n';
  } else if (cmd == ":help") {
    out << "enter a query, or :stats, :cache, :save PATH, :load PATH, :quit\n";
  } else {
    throw ParamError("unknown command " + cmd);
  }
}

int cmd_repl(const SessionFlags& flags, std::istream& in, std::ostream& out, std::ostream& err) {
  std::unique_ptr<Session> session;
  try {
    auto db = std::make_shared<const TransactionDB>(load_db(flags.data));
    session = std::make_unique<Session>(db, flags.config());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return error_code(e);
  }
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    if (line == ":quit" || line == ":q") break;
    try {
      if (line.front() == ':') {
        repl_meta(*session, line, out);
        continue;
      }
      const QueryAnswer answer = session->run(line);
      print_rules(answer.rules, "text", out);
      out << stats_line(answer.stats) << '\n';
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
    }
  }
  return kExitOk;
}

int cmd_gen(const GeneratorParams& params, const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const TransactionDB db = generate_db(params);
    if (path.empty() || path == "-") {
      write_db(db, out);
      return kExitOk;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write " + path);
    write_db(db, file);
    if (!file) throw IoError("write failure on " + path);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return error_code(e);
  }
}

std::vector<Strategy> parse_strategies(const std::string& text) {
  if (text == "all") return {Strategy::integrated, Strategy::postprocess, Strategy::incremental};
  std::vector<Strategy> out;
  std::istringstream in(text);
  std::string name;
  while (std::getline(in, name, ',')) {
    auto s = parse_strategy(name);
    if (!s) throw ParamError("unknown strategy '" + name + "'");
    out.push_back(*s);
  }
  return out;
}

int cmd_bench(const SessionFlags& flags, std::size_t n, std::uint64_t seed, const std::string& strategies,
              const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    auto db = std::make_shared<const TransactionDB>(load_db(flags.data));
    SessionConfig config = flags.config();
    const auto chosen = parse_strategies(strategies);

    // Queries with an empty answer are redrawn; the check runs on the
    // materialized sets when they fit, else by integrated mining.
    SessionConfig probe_config = config;
    probe_config.strategy = Strategy::postprocess;
    std::unique_ptr<Session> probe;
    try {
      probe = std::make_unique<Session>(db, probe_config);
    } catch (const InfeasibleError&) {
      probe_config.strategy = Strategy::integrated;
      probe = std::make_unique<Session>(db, probe_config);
    }
    QueryGenerator gen(*db, config.floor_support, seed);
    const auto queries = generate_queries(gen, n, [&](const std::string& q) {
      try {
        return !probe->run(q).rules.empty();
      } catch (const Error&) {
        return false;
      }
    });

    const auto rows = run_benchmark(db, queries, chosen, config);
    if (path.empty() || path == "-") {
      write_csv(rows, out);
    } else {
      std::ofstream file(path);
      if (!file) throw IoError("cannot write " + path);
      write_csv(rows, file);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return error_code(e);
  }
}

int cmd_serve(const std::string& host, int port, const std::vector<std::string>& datasets, long timeout_ms,
              unsigned threads, std::ostream& out, std::ostream& err) {
  ServiceConfig config;
  for (const auto& d : datasets) {
    const auto eq = d.find('=');
    if (eq == std::string::npos || eq == 0) {
      err << "error: --dataset expects name=path, got '" << d << "'\n";
      return kExitQuery;
    }
    config.datasets.emplace(d.substr(0, eq), d.substr(eq + 1));
  }
  config.query_timeout = std::chrono::milliseconds(timeout_ms);
  config.threads = threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : threads;
  Service service(std::move(config));
  out << "listening on " << host << ':' << port << std::endl;
  if (!service.listen(host, port)) {
    err << "error: cannot listen on " << host << ':' << port << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interactive constrained association rule mining"};
  app.require_subcommand(1);

  SessionFlags repl_flags;
  auto* repl = app.add_subcommand("repl", "Interactive session reading one query per line");
  repl_flags.add_to(repl);

  SessionFlags run_flags;
  std::string query;
  std::string format = "text";
  auto* run = app.add_subcommand("run", "Answer a single query");
  run_flags.add_to(run);
  run->add_option("--query", query, "Rule query")->required();
  run->add_option("--format", format, "text|jsonl")->check(CLI::IsMember({"text", "jsonl"}));

  GeneratorParams gen_params;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a synthetic transaction file");
  gen->add_option("--items", gen_params.items, "Number of distinct items");
  gen->add_option("--transactions", gen_params.transactions, "Number of transactions");
  gen->add_option("--avg-len", gen_params.avg_len, "Mean transaction length");
  gen->add_option("--skew", gen_params.skew, "Zipf exponent of item popularity");
  gen->add_option("--seed", gen_params.seed, "Random seed");
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  SessionFlags bench_flags;
  std::size_t bench_n = 20;
  std::uint64_t bench_seed = 1;
  std::string bench_strategies = "all";
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Run a random query session and write a CSV timing table");
  bench_flags.add_to(bench);
  bench->add_option("--queries", bench_n, "Number of random queries");
  bench->add_option("--seed", bench_seed, "Seed of the query generator");
  bench->add_option("--strategies", bench_strategies, "all or a comma list of integrated,post,incremental");
  bench->add_option("--out", bench_out, "CSV file (default stdout)");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> datasets;
  long timeout_ms = 60'000;
  unsigned serve_threads = 1;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--dataset", datasets, "Register a dataset as name=path (repeatable)");
  serve->add_option("--timeout-ms", timeout_ms, "Per-query time limit");
  serve->add_option("--threads", serve_threads, "Miner threads per query");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitQuery;
  }

  try {
    if (*repl) return cmd_repl(repl_flags, in, out, err);
    if (*run) return cmd_run(run_flags, query, format, out, err);
    if (*gen) return cmd_gen(gen_params, gen_out, out, err);
    if (*bench) return cmd_bench(bench_flags, bench_n, bench_seed, bench_strategies, bench_out, out, err);
    if (*serve) return cmd_serve(host, port, datasets, timeout_ms, serve_threads, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return error_code(e);
  }
  return kExitQuery;
}

}  // namespace qmine
