#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cognate/session.hpp"

namespace cognate::bench {

enum class Category { Instantaneous, Uninterrupted, Attention, Over };

// Strict thresholds at 100, 1000 and 10000 ms.
Category categorize(double mean_ms);
std::string_view to_string(Category c);

struct Timing {
  std::size_t runs = 0;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;  // sample standard deviation; 0 for a single run
  Category category = Category::Instantaneous;
};

Timing summarize(const std::vector<double>& samples_ms);

struct DatasetSpec {
  std::string name;
  std::string source;  // a file path, or a generator: matrix:ROWS:COLS or records:ROWS
};

struct Entry {
  std::string name;
  std::filesystem::path program;
  std::vector<DatasetSpec> datasets;
  std::size_t demand_outputs = 1;  // output cells selected for the demands query
  std::size_t singletons = 16;     // input cells tried one at a time for demandedBy
};

struct Config {
  std::size_t runs = 10;
  std::uint32_t seed = 1;
  std::vector<Entry> entries;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Key-value lines; `[name]` starts an entry. Relative paths resolve against base.
Config parse_config(std::string_view text, const std::filesystem::path& base);
Config load_config(const std::filesystem::path& path);

Dataset generate(const std::string& name, const std::string& generator, std::uint32_t seed);

struct Result {
  std::string name;
  bool ok = false;
  std::string error;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  Timing eval;                // (a) evaluation with graph construction
  Timing demands;             // (b) demBy on the opposite graph
  Timing demanded_by;         // (c) direct demBy, per singleton selection
  Timing demanded_by_suffices;  // (d) complement of suffices on the complement, per singleton
  double ratio = 0.0;         // (d) mean over (c) mean
};

std::vector<Result> run(const Config& config, std::ostream* progress = nullptr);
void print_report(const std::vector<Result>& results, std::ostream& out);

}  // namespace cognate::bench
