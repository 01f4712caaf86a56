#include "causalid/separation.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace causalid {

namespace {

std::string join(const NodeSet& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ", ";
    out += v;
  }
  return out;
}

}  // namespace

std::string CiStatement::to_string() const {
  std::string out = join(left) + " _||_ " + join(right);
  if (!given.empty()) out += " | " + join(given);
  return out;
}

bool m_separated(const Admg& g, const NodeSet& a, const NodeSet& b,
                 const NodeSet& z) {
  if (a.empty() || b.empty()) throw GraphError("m_separated: empty side");
  auto check_disjoint = [](const NodeSet& x, const NodeSet& y, const char* what) {
    for (const auto& v : x) {
      if (y.count(v)) throw GraphError(std::string("m_separated: ") + what +
                                       " share node '" + v + "'");
    }
  };
  check_disjoint(a, b, "sides");
  check_disjoint(a, z, "side and conditioning set");
  check_disjoint(b, z, "side and conditioning set");
  for (const NodeSet* s : {&a, &b, &z}) {
    for (const auto& v : *s) {
      if (!g.has_node(v)) {
        throw GraphError("m_separated: unknown node '" + v + "'");
      }
    }
  }

  const NodeSet anz = z.empty() ? NodeSet{} : ancestors(g, z);

  // Reachability over (node, entry mark) states. Mark records how the walk
  // arrived: head = edge points into the node, tail = edge points away.
  enum Mark { kTail = 0, kHead = 1 };
  std::set<std::pair<std::string, int>> visited;
  std::deque<std::pair<std::string, int>> frontier;
  auto arrive = [&](const std::string& v, Mark m) {
    if (visited.insert({v, m}).second) frontier.push_back({v, m});
  };
  // Leaving a source node is unconditional; record the first arrival marks.
  for (const auto& s : a) {
    for (const auto& w : g.children(s)) arrive(w, kHead);
    for (const auto& w : g.parents(s)) arrive(w, kTail);
    for (const auto& w : g.siblings(s)) arrive(w, kHead);
  }
  while (!frontier.empty()) {
    const auto [v, m_in] = frontier.front();
    frontier.pop_front();
    if (b.count(v)) return false;
    // Departing through a tail mark at v never forms a collider.
    const bool pass_non_collider = z.count(v) == 0;
    // Departing through a head mark at v forms a collider exactly when the
    // walk also entered through a head; colliders stay open within An(z).
    const bool pass_head_out =
        (m_in == kHead) ? anz.count(v) > 0 : pass_non_collider;
    if (pass_non_collider) {
      for (const auto& w : g.children(v)) arrive(w, kHead);
    }
    if (pass_head_out) {
      for (const auto& w : g.parents(v)) arrive(w, kTail);
      for (const auto& w : g.siblings(v)) arrive(w, kHead);
    }
  }
  return true;
}

std::vector<CiStatement> implied_independencies(const Admg& g, int max_given) {
  std::vector<std::string> nodes(g.nodes());
  std::sort(nodes.begin(), nodes.end());
  std::vector<CiStatement> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const std::string& u = nodes[i];
      const std::string& v = nodes[j];
      if (g.adjacent(u, v)) continue;
      std::vector<std::string> rest;
      for (const auto& w : nodes) {
        if (w != u && w != v) rest.push_back(w);
      }
      const std::size_t limit =
          max_given < 0 ? rest.size()
                        : std::min<std::size_t>(max_given, rest.size());
      bool found = false;
      for (std::size_t k = 0; k <= limit && !found; ++k) {
        // Size-k index combinations in lexicographic order.
        std::vector<std::size_t> idx(k);
        for (std::size_t t = 0; t < k; ++t) idx[t] = t;
        while (true) {
          NodeSet given;
          for (std::size_t t : idx) given.insert(rest[t]);
          if (m_separated(g, {u}, {v}, given)) {
            out.push_back({{u}, {v}, given});
            found = true;
            break;
          }
          // Advance the combination.
          std::size_t t = k;
          while (t > 0 && idx[t - 1] == rest.size() - (k - (t - 1))) --t;
          if (t == 0) break;
          ++idx[t - 1];
          for (std::size_t s = t; s < k; ++s) idx[s] = idx[s - 1] + 1;
        }
      }
    }
  }
  return out;
}

}  // namespace causalid
