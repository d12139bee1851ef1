#include "cognate/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "cognate/query.hpp"
#include "cognate/surface.hpp"

namespace cognate::bench {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t to_count(const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const unsigned long n = std::stoul(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return n;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected a count, got " + value);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f) {
  const auto t0 = Clock::now();
  f();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

const char* const kRegions[] = {"USA", "CHN", "IND", "DEU", "BRA", "JPN"};

}  // namespace

Category categorize(double mean_ms) {
  if (mean_ms < 100.0) return Category::Instantaneous;
  if (mean_ms < 1000.0) return Category::Uninterrupted;
  if (mean_ms < 10000.0) return Category::Attention;
  return Category::Over;
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Instantaneous: return "instantaneous";
    case Category::Uninterrupted: return "uninterrupted";
    case Category::Attention: return "attention";
    case Category::Over: return "over";
  }
  return "?";
}

Timing summarize(const std::vector<double>& samples) {
  Timing t;
  t.runs = samples.size();
  if (samples.empty()) return t;
  t.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - t.mean_ms) * (x - t.mean_ms);
    t.stddev_ms = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  }
  t.category = categorize(t.mean_ms);
  return t;
}

Config parse_config(std::string_view text, const std::filesystem::path& base) {
  Config c;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  Entry* current = nullptr;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("line " + std::to_string(line) + ": unterminated section");
      c.entries.push_back(Entry{trim(s.substr(1, s.size() - 2)), {}, {}, 1, 16});
      current = &c.entries.back();
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (current == nullptr) {
      if (key == "runs") {
        c.runs = to_count(value, line);
      } else if (key == "seed") {
        c.seed = static_cast<std::uint32_t>(to_count(value, line));
      } else {
        throw ConfigError("line " + std::to_string(line) + ": unknown setting " + key);
      }
      continue;
    }
    if (key == "program") {
      current->program = base / value;
    } else if (key.rfind("data.", 0) == 0) {
      std::string source = value;
      if (source.rfind("matrix:", 0) != 0 && source.rfind("records:", 0) != 0) source = (base / source).string();
      current->datasets.push_back(DatasetSpec{key.substr(5), source});
    } else if (key == "demand_outputs") {
      current->demand_outputs = to_count(value, line);
    } else if (key == "singletons") {
      current->singletons = to_count(value, line);
    } else {
      throw ConfigError("line " + std::to_string(line) + ": unknown key " + key);
    }
  }
  for (const auto& e : c.entries) {
    if (e.program.empty()) throw ConfigError("entry " + e.name + " has no program");
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::filesystem::filesystem_error("cannot read", path, std::make_error_code(std::errc::no_such_file_or_directory));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

Dataset generate(const std::string& name, const std::string& generator, std::uint32_t seed) {
  const auto parts = split(generator, ':');
  std::mt19937 rng(seed);
  if (parts.size() == 3 && parts[0] == "matrix") {
    const std::size_t rows = to_count(parts[1], 0);
    const std::size_t cols = to_count(parts[2], 0);
    std::uniform_int_distribution<int> pixel(0, 255);
    std::vector<PlainTerm> matrix;
    for (std::size_t i = 0; i < rows; ++i) {
      std::vector<PlainTerm> row;
      for (std::size_t j = 0; j < cols; ++j) row.push_back(PlainTerm::integer(pixel(rng)));
      PlainTerm list = PlainTerm::constr("Nil");
      for (auto it = row.rbegin(); it != row.rend(); ++it) list = PlainTerm::constr("Cons", {*it, list});
      matrix.push_back(std::move(list));
    }
    PlainTerm list = PlainTerm::constr("Nil");
    for (auto it = matrix.rbegin(); it != matrix.rend(); ++it) list = PlainTerm::constr("Cons", {*it, list});
    return Dataset{name, std::move(list)};
  }
  if (parts.size() == 2 && parts[0] == "records") {
    const std::size_t rows = to_count(parts[1], 0);
    std::uniform_real_distribution<double> amount(0.0, 100.0);
    std::vector<PlainTerm> records;
    for (std::size_t i = 0; i < rows; ++i) {
      const double v = std::round(amount(rng) * 100.0) / 100.0;
      records.push_back(PlainTerm::record({
          {"region", PlainTerm::string(kRegions[i % 6])},
          {"value", PlainTerm::floating(v)},
          {"year", PlainTerm::integer(static_cast<std::int64_t>(2000 + i / 6))},
      }));
    }
    PlainTerm list = PlainTerm::constr("Nil");
    for (auto it = records.rbegin(); it != records.rend(); ++it) list = PlainTerm::constr("Cons", {*it, list});
    return Dataset{name, std::move(list)};
  }
  throw ConfigError("unknown generator " + generator);
}

namespace {

Result run_entry(const Entry& e, const Config& c) {
  Result r;
  r.name = e.name;

  std::ifstream in(e.program, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + e.program.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const ExprPtr core = surface::compile(buf.str());

  std::vector<Dataset> datasets;
  for (const auto& d : e.datasets) {
    if (d.source.rfind("matrix:", 0) == 0 || d.source.rfind("records:", 0) == 0) {
      datasets.push_back(generate(d.name, d.source, c.seed));
    } else {
      datasets.push_back(load_dataset(d.name, d.source));
    }
  }

  std::vector<double> eval_ms;
  Session s;
  for (std::size_t i = 0; i < c.runs; ++i) {
    eval_ms.push_back(time_ms([&] { s = cognate::run(*core, datasets); }));
  }
  r.eval = summarize(eval_ms);
  r.vertices = s.graph.vertex_count();
  r.edges = s.graph.edge_count();

  // Selections: the first output cells, and input cells spread over the dataset.
  const VertexSet sinks = s.graph.sinks();
  const VertexSet sources = s.graph.sources();
  VertexSet outputs(s.graph.capacity());
  for (const auto& [path, a] : s.outputs.entries()) {
    if (outputs.size() >= e.demand_outputs) break;
    if (sinks.contains(a)) outputs.insert(a);
  }
  std::vector<Address> cells;
  for (const auto& [path, a] : s.inputs.entries()) {
    if (sources.contains(a)) cells.push_back(a);
  }
  if (outputs.empty()) throw std::runtime_error("no output cells to select");
  if (cells.empty()) throw std::runtime_error("no input cells to select");
  std::vector<VertexSet> singletons;
  const std::size_t n = std::min(e.singletons, cells.size());
  for (std::size_t k = 0; k < n; ++k) singletons.push_back(VertexSet{cells[k * cells.size() / n]});

  std::vector<double> demands_ms, direct_ms, dual_ms;
  std::size_t sink = 0;
  for (std::size_t i = 0; i < c.runs; ++i) {
    demands_ms.push_back(time_ms([&] { sink += demands(s.graph, outputs).size(); }));
    direct_ms.push_back(time_ms([&] {
                          for (const auto& x : singletons) sink += demanded_by(s.graph, x).size();
                        }) /
                        static_cast<double>(singletons.size()));
    dual_ms.push_back(time_ms([&] {
                        for (const auto& x : singletons) sink += alt::demanded_by(s.graph, x).size();
                      }) /
                      static_cast<double>(singletons.size()));
  }
  // Keeps the query results observable so the calls are not elided.
  if (sink == static_cast<std::size_t>(-1)) r.error = "unreachable";

  r.demands = summarize(demands_ms);
  r.demanded_by = summarize(direct_ms);
  r.demanded_by_suffices = summarize(dual_ms);
  r.ratio = r.demanded_by.mean_ms > 0.0 ? r.demanded_by_suffices.mean_ms / r.demanded_by.mean_ms : 0.0;
  r.ok = true;
  return r;
}

}  // namespace

std::vector<Result> run(const Config& config, std::ostream* progress) {
  std::vector<Result> out;
  for (const auto& e : config.entries) {
    if (progress != nullptr) *progress << "bench " << e.name << "\n";
    try {
      out.push_back(run_entry(e, config));
    } catch (const std::exception& ex) {
      Result r;
      r.name = e.name;
      r.error = ex.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

void print_report(const std::vector<Result>& results, std::ostream& out) {
  auto cell = [&](const Timing& t) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << t.mean_ms << " +- " << t.stddev_ms << " (" << to_string(t.category)
      << ")";
    return s.str();
  };
  out << "benchmark\truns\tvertices\tedges\teval ms\tdemands ms\tdemBy ms\tdemBy-suff ms\tsuff/demBy\n";
  for (const auto& r : results) {
    if (!r.ok) {
      out << r.name << "\tFAILED\t" << r.error << "\n";
      continue;
    }
    out << r.name << "\t" << r.eval.runs << "\t" << r.vertices << "\t" << r.edges << "\t" << cell(r.eval) << "\t"
        << cell(r.demands) << "\t" << cell(r.demanded_by) << "\t" << cell(r.demanded_by_suffices) << "\t"
        << std::fixed << std::setprecision(2) << r.ratio << "\n";
  }
}

}  // namespace cognate::bench
