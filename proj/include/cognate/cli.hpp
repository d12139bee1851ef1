#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cognate/graph.hpp"
#include "cognate/session.hpp"

namespace cognate {

// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitMissingFile = 2,
  kExitResolve = 3,
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

class ResolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Comma-separated paths (`data[2]`, `out[1]`, `table[0].co2e`) or vertex ids
// (`17` or `#17`). Paths resolve through the input map, then the output map.
VertexSet resolve_selection(const StoredSession& s, const std::string& spec);

}  // namespace cognate
