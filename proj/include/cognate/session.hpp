#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cognate/core.hpp"
#include "cognate/eval.hpp"
#include "cognate/graph.hpp"

namespace cognate {

// Bidirectional map between textual paths and addresses. List spine cells
// are not mapped; elements are `name[i]`, record fields `.field`, other
// constructor arguments `#i`.
class PathMap {
 public:
  void add(std::string path, Address a);
  std::optional<Address> find(std::string_view path) const;
  std::optional<std::string> path_of(Address a) const;
  VertexSet addresses() const;
  const std::vector<std::pair<std::string, Address>>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

 private:
  std::vector<std::pair<std::string, Address>> entries_;
};

void collect_paths(const Value& v, const std::string& root, PathMap& out);

struct Dataset {
  std::string name;
  PlainTerm value;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Header row gives field names; cells become ints, floats or strings.
Dataset parse_csv(std::string name, std::string_view text);
// Arrays become lists, objects records, booleans True/False, null None.
Dataset parse_json(std::string name, std::string_view text);
// Dispatches on the file extension (.csv or .json).
Dataset load_dataset(std::string name, const std::filesystem::path& path);

struct RunOptions {
  const ForeignRegistry* foreign = nullptr;  // standard registry when null
  EvalLimits limits;
};

struct Session {
  Value result;
  DepGraph graph;
  PathMap inputs;
  PathMap outputs;
  std::vector<VertexInfo> info;  // indexed by address id

  std::string label(Address a) const;
};

// Datasets are addressed first (pre-order, one dataset after another), then
// the foreign wrapper closures, then the program is evaluated with no demand.
Session run(const Expr& program, const std::vector<Dataset>& datasets, const RunOptions& options = {});

// Names bound in the initial environment besides datasets.
std::vector<std::string> prelude_names(const ForeignRegistry& foreign);

// On-disk form of a session as written by `eval --out`.
struct StoredSession {
  std::string result_text;
  DepGraph graph;
  PathMap inputs;
  PathMap outputs;
  std::vector<std::string> labels;  // indexed by address id; empty when unknown
};

class SessionFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_session(const std::filesystem::path& dir, const Session& s);
StoredSession read_session(const std::filesystem::path& dir);

}  // namespace cognate
