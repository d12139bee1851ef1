#include "cognate/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cognate/bench.hpp"
#include "cognate/query.hpp"
#include "cognate/service.hpp"
#include "cognate/surface.hpp"

namespace cognate {

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::filesystem::filesystem_error("cannot read", p, std::make_error_code(std::errc::no_such_file_or_directory));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::uint32_t> parse_id(std::string_view s) {
  if (!s.empty() && s.front() == '#') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  std::uint32_t id = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return id;
}

struct EvalArgs {
  std::string program;
  std::vector<std::string> data;
  std::string out_dir;
  bool dump_core = false;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const std::string text = read_text(a.program);
  const ExprPtr core = surface::compile(text);
  if (a.dump_core) {
    out << to_debug(*core) << "\n";
    return kExitOk;
  }

  std::vector<Dataset> datasets;
  for (const auto& spec : a.data) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      err << "error: --data expects name=path, got " << spec << "\n";
      return kExitFailure;
    }
    datasets.push_back(load_dataset(spec.substr(0, eq), spec.substr(eq + 1)));
  }
  for (const auto& name : surface::parse(text).datasets()) {
    const bool given = std::any_of(datasets.begin(), datasets.end(), [&](const Dataset& d) { return d.name == name; });
    if (!given) {
      err << "error: dataset " << name << " is declared but not supplied\n";
      return kExitMissingFile;
    }
  }

  const Session s = run(*core, datasets);
  out << to_string(erase(s.result)) << "\n";
  out << "vertices " << s.graph.vertex_count() << "\n";
  out << "edges " << s.graph.edge_count() << "\n";
  if (!a.out_dir.empty()) write_session(a.out_dir, s);
  return kExitOk;
}

struct QueryArgs {
  std::string dir;
  std::string op;
  std::string spec;
  std::string restrict_to = "none";
};

int cmd_query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  const auto op = parse_query_op(a.op);
  if (!op) {
    err << "error: unknown query " << a.op << "\n";
    return kExitFailure;
  }
  const StoredSession s = read_session(a.dir);
  const VertexSet selection = resolve_selection(s, a.spec);
  VertexSet result = run_query(*op, s.graph, selection);

  const PathMap* paths = nullptr;
  if (a.restrict_to == "inputs") {
    paths = &s.inputs;
  } else if (a.restrict_to == "outputs") {
    paths = &s.outputs;
  }
  if (paths != nullptr) result &= paths->addresses();

  result.for_each([&](Address x) {
    std::string path = "-";
    if (auto p = s.inputs.path_of(x)) {
      path = *p;
    } else if (auto q = s.outputs.path_of(x)) {
      path = *q;
    }
    const std::string label = x.id < s.labels.size() ? s.labels[x.id] : std::string();
    out << x.id << "\t" << path << "\t" << label << "\n";
  });
  return kExitOk;
}

int cmd_export_dot(const std::string& dir, const std::string& file, std::ostream& out) {
  const StoredSession s = read_session(dir);
  const std::string dot = to_dot(s.graph, [&](Address a) {
    return a.id < s.labels.size() && !s.labels[a.id].empty() ? s.labels[a.id] : std::to_string(a.id);
  });
  if (file.empty()) {
    out << dot;
  } else {
    std::ofstream f(file, std::ios::binary);
    if (!f) throw std::filesystem::filesystem_error("cannot write", file, std::make_error_code(std::errc::io_error));
    f << dot;
  }
  return kExitOk;
}

int cmd_bench(const std::string& config_path, std::size_t runs, std::ostream& out, std::ostream& err) {
  bench::Config config = bench::load_config(config_path);
  if (runs > 0) config.runs = runs;
  const auto results = bench::run(config, &err);
  bench::print_report(results, out);
  const bool all_ok = std::all_of(results.begin(), results.end(), [](const bench::Result& r) { return r.ok; });
  return all_ok ? kExitOk : kExitFailure;
}

}  // namespace

VertexSet resolve_selection(const StoredSession& s, const std::string& spec) {
  VertexSet out(s.graph.capacity());
  std::stringstream parts(spec);
  std::string item;
  while (std::getline(parts, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::optional<Address> a;
    if (auto id = parse_id(item)) {
      a = Address{*id};
      if (!s.graph.has_vertex(*a)) throw ResolveError("no vertex " + item);
    } else if (auto x = s.inputs.find(item)) {
      a = x;
    } else if (auto y = s.outputs.find(item)) {
      a = y;
    } else {
      throw ResolveError("cannot resolve " + item);
    }
    out.insert(*a);
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate programs with dependence graphs and query them"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate a program and record its dependence graph");
  eval->add_option("program", eval_args.program, "Program source")->required();
  eval->add_option("-d,--data", eval_args.data, "Dataset as name=path (.csv or .json)");
  eval->add_option("-o,--out", eval_args.out_dir, "Session directory to write");
  eval->add_flag("--dump-core", eval_args.dump_core, "Print the desugared core program and stop");

  QueryArgs query_args;
  auto* query = app.add_subcommand("query", "Run a selection query against a stored session");
  query->add_option("session", query_args.dir, "Session directory")->required();
  query->add_option("op", query_args.op, "demands, demandedBy, suffices, dualPreimage, linkedInputs, linkedOutputs")
      ->required();
  query->add_option("selection", query_args.spec, "Comma-separated paths or vertex ids")->required();
  query->add_option("-r,--restrict", query_args.restrict_to, "Filter the result")
      ->check(CLI::IsMember({"inputs", "outputs", "none"}));

  std::string bench_config;
  std::size_t bench_runs = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite");
  bench_cmd->add_option("config", bench_config, "Suite configuration")->required();
  bench_cmd->add_option("--runs", bench_runs, "Override the number of runs");

  std::string dot_dir;
  std::string dot_file;
  auto* dot = app.add_subcommand("export-dot", "Write a session graph in Graphviz format");
  dot->add_option("session", dot_dir, "Session directory")->required();
  dot->add_option("-o,--output", dot_file, "Output file (default stdout)");

  int port = 8080;
  std::size_t session_cap = 32;
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--port", port, "Port to listen on");
  serve->add_option("--session-cap", session_cap, "Sessions kept before LRU eviction");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*eval) return cmd_eval(eval_args, out, err);
    if (*query) return cmd_query(query_args, out, err);
    if (*bench_cmd) return cmd_bench(bench_config, bench_runs, out, err);
    if (*dot) return cmd_export_dot(dot_dir, dot_file, out);
    if (*serve) return service::serve(port, session_cap, err);
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitMissingFile;
  } catch (const ResolveError& e) {
    err << "error: " << e.what() << "\n";
    return kExitResolve;
  } catch (const UniverseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitResolve;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace cognate
