#include "causalid/graph.hpp"

#include <algorithm>
#include <cctype>
#include <queue>
#include <sstream>

#include <json.hpp>

namespace causalid {

namespace {

using Edge = std::pair<std::string, std::string>;

void check_acyclic(const std::vector<std::string>& nodes,
                   const std::map<std::string, NodeSet>& children) {
  // Kahn; leftover nodes mean a directed cycle.
  std::map<std::string, int> indeg;
  for (const auto& v : nodes) indeg[v] = 0;
  for (const auto& [u, ch] : children) {
    for (const auto& v : ch) ++indeg[v];
  }
  std::queue<std::string> ready;
  for (const auto& [v, d] : indeg) {
    if (d == 0) ready.push(v);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    const std::string v = ready.front();
    ready.pop();
    ++seen;
    auto it = children.find(v);
    if (it == children.end()) continue;
    for (const auto& w : it->second) {
      if (--indeg[w] == 0) ready.push(w);
    }
  }
  if (seen != nodes.size()) throw GraphError("graph has a directed cycle");
}

}  // namespace

Admg::Admg(std::vector<std::string> nodes, std::vector<Edge> directed,
           std::vector<Edge> bidirected)
    : nodes_(std::move(nodes)) {
  std::set<std::string> seen;
  for (const auto& v : nodes_) {
    if (v.empty()) throw GraphError("empty node name");
    if (!seen.insert(v).second) throw GraphError("duplicate node '" + v + "'");
    parents_[v];
    children_[v];
    siblings_[v];
  }
  for (const auto& [u, v] : directed) {
    check_node(u);
    check_node(v);
    if (u == v) throw GraphError("self-loop on '" + u + "'");
    if (!children_[u].insert(v).second) {
      throw GraphError("duplicate edge " + u + " -> " + v);
    }
    parents_[v].insert(u);
  }
  for (const auto& [u, v] : bidirected) {
    check_node(u);
    check_node(v);
    if (u == v) throw GraphError("self-loop on '" + u + "'");
    if (siblings_[u].count(v)) {
      throw GraphError("duplicate edge " + u + " <-> " + v);
    }
    siblings_[u].insert(v);
    siblings_[v].insert(u);
  }
  check_acyclic(nodes_, children_);
}

NodeSet Admg::node_set() const { return NodeSet(nodes_.begin(), nodes_.end()); }

bool Admg::has_node(const std::string& v) const { return parents_.count(v) > 0; }

void Admg::check_node(const std::string& v) const {
  if (!has_node(v)) throw GraphError("unknown node '" + v + "'");
}

const NodeSet& Admg::parents(const std::string& v) const {
  auto it = parents_.find(v);
  if (it == parents_.end()) throw GraphError("unknown node '" + v + "'");
  return it->second;
}

const NodeSet& Admg::children(const std::string& v) const {
  auto it = children_.find(v);
  if (it == children_.end()) throw GraphError("unknown node '" + v + "'");
  return it->second;
}

const NodeSet& Admg::siblings(const std::string& v) const {
  auto it = siblings_.find(v);
  if (it == siblings_.end()) throw GraphError("unknown node '" + v + "'");
  return it->second;
}

std::vector<Edge> Admg::directed_edges() const {
  std::vector<Edge> out;
  for (const auto& [u, ch] : children_) {
    for (const auto& v : ch) out.emplace_back(u, v);
  }
  return out;
}

std::vector<Edge> Admg::bidirected_edges() const {
  std::vector<Edge> out;
  for (const auto& [u, sib] : siblings_) {
    for (const auto& v : sib) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

bool Admg::has_directed(const std::string& u, const std::string& v) const {
  auto it = children_.find(u);
  return it != children_.end() && it->second.count(v) > 0;
}

bool Admg::has_bidirected(const std::string& u, const std::string& v) const {
  auto it = siblings_.find(u);
  return it != siblings_.end() && it->second.count(v) > 0;
}

bool Admg::adjacent(const std::string& u, const std::string& v) const {
  return has_directed(u, v) || has_directed(v, u) || has_bidirected(u, v);
}

LatentDag::LatentDag(std::vector<std::string> nodes, std::vector<Edge> directed,
                     NodeSet latent)
    : nodes_(std::move(nodes)), latent_(std::move(latent)) {
  std::set<std::string> seen;
  for (const auto& v : nodes_) {
    if (v.empty()) throw GraphError("empty node name");
    if (!seen.insert(v).second) throw GraphError("duplicate node '" + v + "'");
    parents_[v];
    children_[v];
  }
  for (const auto& v : latent_) {
    if (!seen.count(v)) throw GraphError("unknown latent node '" + v + "'");
  }
  for (const auto& [u, v] : directed) {
    if (!seen.count(u)) throw GraphError("unknown node '" + u + "'");
    if (!seen.count(v)) throw GraphError("unknown node '" + v + "'");
    if (u == v) throw GraphError("self-loop on '" + u + "'");
    if (!children_[u].insert(v).second) {
      throw GraphError("duplicate edge " + u + " -> " + v);
    }
    parents_[v].insert(u);
  }
  check_acyclic(nodes_, children_);
}

std::vector<std::string> LatentDag::observed() const {
  std::vector<std::string> out;
  for (const auto& v : nodes_) {
    if (!latent_.count(v)) out.push_back(v);
  }
  return out;
}

bool LatentDag::has_node(const std::string& v) const { return parents_.count(v) > 0; }
bool LatentDag::is_latent(const std::string& v) const { return latent_.count(v) > 0; }

const NodeSet& LatentDag::parents(const std::string& v) const {
  auto it = parents_.find(v);
  if (it == parents_.end()) throw GraphError("unknown node '" + v + "'");
  return it->second;
}

const NodeSet& LatentDag::children(const std::string& v) const {
  auto it = children_.find(v);
  if (it == children_.end()) throw GraphError("unknown node '" + v + "'");
  return it->second;
}

std::vector<Edge> LatentDag::directed_edges() const {
  std::vector<Edge> out;
  for (const auto& [u, ch] : children_) {
    for (const auto& v : ch) out.emplace_back(u, v);
  }
  return out;
}

Admg latent_project(const LatentDag& g) {
  // Observed nodes reachable from `start` by directed paths whose interior
  // nodes are all latent.
  auto latent_reach = [&](const std::string& start) {
    NodeSet reached;
    NodeSet visited_latent;
    std::queue<std::string> frontier;
    frontier.push(start);
    while (!frontier.empty()) {
      const std::string u = frontier.front();
      frontier.pop();
      for (const auto& c : g.children(u)) {
        if (g.is_latent(c)) {
          if (visited_latent.insert(c).second) frontier.push(c);
        } else {
          reached.insert(c);
        }
      }
    }
    return reached;
  };

  std::vector<std::string> observed = g.observed();
  NodeSet observed_set(observed.begin(), observed.end());
  std::set<Edge> directed;
  std::set<Edge> bidirected;
  for (const auto& v : g.nodes()) {
    NodeSet reached = latent_reach(v);
    if (!g.is_latent(v)) {
      for (const auto& w : reached) directed.insert({v, w});
    } else {
      for (auto it = reached.begin(); it != reached.end(); ++it) {
        for (auto jt = std::next(it); jt != reached.end(); ++jt) {
          bidirected.insert({*it, *jt});
        }
      }
    }
  }
  return Admg(observed,
              std::vector<Edge>(directed.begin(), directed.end()),
              std::vector<Edge>(bidirected.begin(), bidirected.end()));
}

NodeSet ancestors(const Admg& g, const NodeSet& s) {
  NodeSet out;
  std::queue<std::string> frontier;
  for (const auto& v : s) {
    if (!g.has_node(v)) throw GraphError("unknown node '" + v + "'");
    out.insert(v);
    frontier.push(v);
  }
  while (!frontier.empty()) {
    const std::string v = frontier.front();
    frontier.pop();
    for (const auto& p : g.parents(v)) {
      if (out.insert(p).second) frontier.push(p);
    }
  }
  return out;
}

std::vector<NodeSet> districts(const Admg& g) {
  std::vector<NodeSet> out;
  NodeSet unvisited(g.nodes().begin(), g.nodes().end());
  // Seed from lexicographically smallest unvisited node, so blocks come out
  // ordered by smallest member.
  while (!unvisited.empty()) {
    NodeSet block;
    std::queue<std::string> frontier;
    const std::string seed = *unvisited.begin();
    unvisited.erase(unvisited.begin());
    block.insert(seed);
    frontier.push(seed);
    while (!frontier.empty()) {
      const std::string v = frontier.front();
      frontier.pop();
      for (const auto& w : g.siblings(v)) {
        if (unvisited.erase(w)) {
          block.insert(w);
          frontier.push(w);
        }
      }
    }
    out.push_back(std::move(block));
  }
  return out;
}

Admg subgraph(const Admg& g, const NodeSet& keep) {
  std::vector<std::string> nodes;
  for (const auto& v : g.nodes()) {
    if (keep.count(v)) nodes.push_back(v);
  }
  for (const auto& v : keep) {
    if (!g.has_node(v)) throw GraphError("unknown node '" + v + "'");
  }
  std::vector<Edge> directed, bidirected;
  for (const auto& [u, v] : g.directed_edges()) {
    if (keep.count(u) && keep.count(v)) directed.emplace_back(u, v);
  }
  for (const auto& [u, v] : g.bidirected_edges()) {
    if (keep.count(u) && keep.count(v)) bidirected.emplace_back(u, v);
  }
  return Admg(std::move(nodes), std::move(directed), std::move(bidirected));
}

Admg mutilate(const Admg& g, const NodeSet& cut_incoming,
              const NodeSet& cut_outgoing) {
  for (const auto& v : cut_incoming) {
    if (!g.has_node(v)) throw GraphError("unknown node '" + v + "'");
  }
  for (const auto& v : cut_outgoing) {
    if (!g.has_node(v)) throw GraphError("unknown node '" + v + "'");
  }
  std::vector<Edge> directed, bidirected;
  for (const auto& [u, v] : g.directed_edges()) {
    if (cut_incoming.count(v) || cut_outgoing.count(u)) continue;
    directed.emplace_back(u, v);
  }
  for (const auto& [u, v] : g.bidirected_edges()) {
    if (cut_incoming.count(u) || cut_incoming.count(v)) continue;
    bidirected.emplace_back(u, v);
  }
  return Admg(g.nodes(), std::move(directed), std::move(bidirected));
}

std::vector<std::string> topological_order(const Admg& g) {
  std::map<std::string, int> indeg;
  for (const auto& v : g.nodes()) indeg[v] = static_cast<int>(g.parents(v).size());
  std::set<std::string> ready;
  for (const auto& [v, d] : indeg) {
    if (d == 0) ready.insert(v);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    const std::string v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (const auto& w : g.children(v)) {
      if (--indeg[w] == 0) ready.insert(w);
    }
  }
  return order;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

ParsedGraph parse_edge_list(const std::string& text) {
  std::vector<std::string> nodes;
  std::set<std::string> node_set;
  auto declare = [&](const std::string& v) {
    if (node_set.insert(v).second) nodes.push_back(v);
  };
  std::vector<Edge> directed, bidirected;
  NodeSet latent;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto malformed = [&](const std::string& what) {
    throw GraphError("line " + std::to_string(line_no) + ": " + what);
  };
  auto is_name = [](const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, op, b, extra;
    ls >> a;
    if (a == "latent") {
      if (!(ls >> b) || (ls >> extra)) malformed("expected 'latent NODE'");
      if (!is_name(b)) malformed("bad node name '" + b + "'");
      declare(b);
      latent.insert(b);
      continue;
    }
    if (!(ls >> op >> b) || (ls >> extra)) {
      malformed("expected 'A -> B', 'A <-> B' or 'latent A'");
    }
    if (!is_name(a)) malformed("bad node name '" + a + "'");
    if (!is_name(b)) malformed("bad node name '" + b + "'");
    declare(a);
    declare(b);
    if (op == "->") {
      directed.emplace_back(a, b);
    } else if (op == "<->") {
      bidirected.emplace_back(a, b);
    } else {
      malformed("unknown edge '" + op + "'");
    }
  }
  if (nodes.empty()) throw GraphError("empty graph description");
  if (!latent.empty()) {
    if (!bidirected.empty()) {
      throw GraphError("bidirected edges cannot be mixed with latent markers");
    }
    return LatentDag(std::move(nodes), std::move(directed), std::move(latent));
  }
  return Admg(std::move(nodes), std::move(directed), std::move(bidirected));
}

ParsedGraph parse_json_graph(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw GraphError(std::string("bad JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
    throw GraphError("expected an object with a \"nodes\" array");
  }
  std::vector<std::string> nodes;
  for (const auto& v : j["nodes"]) {
    if (!v.is_string()) throw GraphError("node names must be strings");
    nodes.push_back(v.get<std::string>());
  }
  auto edges = [&](const char* key) {
    std::vector<Edge> out;
    if (!j.contains(key)) return out;
    if (!j[key].is_array()) throw GraphError(std::string(key) + " must be an array");
    for (const auto& e : j[key]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw GraphError(std::string(key) + " entries must be [from, to] pairs");
      }
      out.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return out;
  };
  std::vector<Edge> directed = edges("directed");
  std::vector<Edge> bidirected = edges("bidirected");
  NodeSet latent;
  if (j.contains("latent")) {
    for (const auto& v : j["latent"]) {
      if (!v.is_string()) throw GraphError("latent names must be strings");
      latent.insert(v.get<std::string>());
    }
  }
  if (!latent.empty()) {
    if (!bidirected.empty()) {
      throw GraphError("bidirected edges cannot be mixed with latent nodes");
    }
    return LatentDag(std::move(nodes), std::move(directed), std::move(latent));
  }
  return Admg(std::move(nodes), std::move(directed), std::move(bidirected));
}

}  // namespace

ParsedGraph parse_graph(const std::string& text, GraphFormat format) {
  if (format == GraphFormat::Json) return parse_json_graph(text);
  return parse_edge_list(text);
}

std::string to_json(const Admg& g) {
  nlohmann::json j;
  j["nodes"] = g.nodes();
  j["directed"] = nlohmann::json::array();
  for (const auto& [u, v] : g.directed_edges()) j["directed"].push_back({u, v});
  j["bidirected"] = nlohmann::json::array();
  for (const auto& [u, v] : g.bidirected_edges()) j["bidirected"].push_back({u, v});
  j["latent"] = nlohmann::json::array();
  return j.dump(2);
}

std::string to_json(const LatentDag& g) {
  nlohmann::json j;
  j["nodes"] = g.nodes();
  j["directed"] = nlohmann::json::array();
  for (const auto& [u, v] : g.directed_edges()) j["directed"].push_back({u, v});
  j["latent"] = std::vector<std::string>(g.latent().begin(), g.latent().end());
  return j.dump(2);
}

}  // namespace causalid
