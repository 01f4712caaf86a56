#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "causalid/errors.hpp"

namespace causalid {

using NodeSet = std::set<std::string>;

// Acyclic directed mixed graph: directed edges plus bidirected edges
// (unordered pairs, stored lexicographically). Immutable after construction;
// construction validates node names, rejects self-loops, duplicate edges and
// directed cycles.
class Admg {
 public:
  Admg() = default;
  Admg(std::vector<std::string> nodes,
       std::vector<std::pair<std::string, std::string>> directed,
       std::vector<std::pair<std::string, std::string>> bidirected);

  const std::vector<std::string>& nodes() const { return nodes_; }
  NodeSet node_set() const;
  bool has_node(const std::string& v) const;
  std::size_t size() const { return nodes_.size(); }

  const NodeSet& parents(const std::string& v) const;
  const NodeSet& children(const std::string& v) const;
  const NodeSet& siblings(const std::string& v) const;  // bidirected neighbors

  std::vector<std::pair<std::string, std::string>> directed_edges() const;
  std::vector<std::pair<std::string, std::string>> bidirected_edges() const;

  bool has_directed(const std::string& u, const std::string& v) const;
  bool has_bidirected(const std::string& u, const std::string& v) const;
  bool adjacent(const std::string& u, const std::string& v) const;

  // Throws GraphError when v is not a node of this graph.
  void check_node(const std::string& v) const;

 private:
  std::vector<std::string> nodes_;
  std::map<std::string, NodeSet> parents_, children_, siblings_;
};

// DAG with a subset of nodes marked latent.
class LatentDag {
 public:
  LatentDag() = default;
  LatentDag(std::vector<std::string> nodes,
            std::vector<std::pair<std::string, std::string>> directed,
            NodeSet latent);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const NodeSet& latent() const { return latent_; }
  std::vector<std::string> observed() const;
  bool has_node(const std::string& v) const;
  bool is_latent(const std::string& v) const;

  const NodeSet& parents(const std::string& v) const;
  const NodeSet& children(const std::string& v) const;
  std::vector<std::pair<std::string, std::string>> directed_edges() const;

 private:
  std::vector<std::string> nodes_;
  std::map<std::string, NodeSet> parents_, children_;
  NodeSet latent_;
};

// Projection onto the observed nodes: directed u->v iff a directed path
// u -> ... -> v has all interior nodes latent; bidirected u<->v iff some
// latent node reaches both u and v through all-latent interiors.
Admg latent_project(const LatentDag& g);

// v together with everything that reaches v by a directed path.
NodeSet ancestors(const Admg& g, const NodeSet& s);

// Connected components under bidirected edges only, ordered by smallest
// member; singletons included.
std::vector<NodeSet> districts(const Admg& g);

// Induced subgraph on `keep`.
Admg subgraph(const Admg& g, const NodeSet& keep);

// Removes directed edges into cut_incoming, directed edges out of
// cut_outgoing, and bidirected edges incident to cut_incoming. Nodes stay.
Admg mutilate(const Admg& g, const NodeSet& cut_incoming,
              const NodeSet& cut_outgoing);

// Kahn's algorithm with lexicographic tie-breaking; deterministic.
std::vector<std::string> topological_order(const Admg& g);

enum class GraphFormat { EdgeList, Json };

using ParsedGraph = std::variant<Admg, LatentDag>;

// Edge list: one item per line, `A -> B`, `A <-> B`, `latent A`, `#` comments.
// JSON: {"nodes": [...], "directed": [["A","B"],...],
//        "bidirected": [...], "latent": [...]}.
// A `latent` marker (or a non-empty "latent" list) makes the result a
// LatentDag, in which case bidirected edges are rejected.
ParsedGraph parse_graph(const std::string& text, GraphFormat format);

std::string to_json(const Admg& g);
std::string to_json(const LatentDag& g);

}  // namespace causalid
