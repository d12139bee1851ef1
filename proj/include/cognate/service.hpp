#pragma once

#include <cstdint>
#include <iosfwd>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cognate/session.hpp"

namespace httplib {
class Server;
}

namespace cognate::service {

struct Stored {
  std::string id;
  Session session;
  std::string view;  // serialised view tree
};

// Sessions by id, evicting the least recently used beyond the cap.
class SessionStore {
 public:
  explicit SessionStore(std::size_t cap) : cap_(cap == 0 ? 1 : cap) {}

  std::shared_ptr<const Stored> insert(Session s, std::string view);
  std::shared_ptr<const Stored> find(std::string_view id);
  std::size_t size() const;
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t cap_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Stored>, std::less<>> sessions_;
  std::mutex order_mutex_;
  std::list<std::string> order_;  // most recent first
  std::uint64_t next_id_ = 1;
};

struct Response {
  int status = 200;
  std::string body;
};

class Service {
 public:
  explicit Service(std::size_t session_cap = 32) : store_(session_cap) {}

  // POST /sessions
  Response create_session(std::string_view body);
  // POST /sessions/{id}/query
  Response query(std::string_view id, std::string_view body);
  // GET /sessions/{id}/graph
  Response graph(std::string_view id);

  // Registers the routes, with CORS headers, on a server.
  void mount(httplib::Server& server);

  SessionStore& store() noexcept { return store_; }

 private:
  SessionStore store_;
};

// View tree for a session: one table per dataset and the charts found in the result.
std::string view_json(const Session& s, const std::vector<std::string>& datasets = {});

// Blocks until the server stops.
int serve(int port, std::size_t session_cap, std::ostream& log);

}  // namespace cognate::service
