#include "dircount/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "dircount/errors.hpp"
#include "json.hpp"

namespace dircount {

namespace {

std::string edge_desc(const DirectedGraph& g, int a) {
  return "'" + g.edge_names[a] + "' (" + g.vertex_names[g.source[a]] + " -> " +
         g.vertex_names[g.goal[a]] + ")";
}

}  // namespace

int DirectedGraph::vertex_id(const std::string& name) const {
  for (int q = 0; q < vertex_count(); ++q) {
    if (vertex_names[q] == name) return q;
  }
  return -1;
}

DirectedGraph make_graph(std::vector<std::string> vertex_names,
                         std::vector<std::string> edge_names,
                         std::vector<int> source, std::vector<int> goal,
                         std::vector<std::string> label_names,
                         std::vector<int> label) {
  DirectedGraph g;
  g.vertex_names = std::move(vertex_names);
  g.edge_names = std::move(edge_names);
  g.source = std::move(source);
  g.goal = std::move(goal);
  g.label_names = std::move(label_names);
  g.label = std::move(label);

  if (g.vertex_names.empty()) throw GraphError("graph has no vertices");
  if (g.edge_names.empty()) throw GraphError("graph has no edges");

  {
    std::unordered_set<std::string> seen;
    for (const auto& name : g.vertex_names) {
      if (name.empty()) throw GraphError("empty vertex name");
      if (!seen.insert(name).second)
        throw GraphError("duplicate vertex name '" + name + "'");
    }
  }
  {
    std::unordered_set<std::string> seen;
    for (const auto& name : g.edge_names) {
      if (name.empty()) throw GraphError("empty edge id");
      if (!seen.insert(name).second)
        throw GraphError("duplicate edge id '" + name + "'");
    }
  }

  const int nq = g.vertex_count();
  const int na = g.edge_count();
  if (static_cast<int>(g.source.size()) != na ||
      static_cast<int>(g.goal.size()) != na)
    throw GraphError("edge endpoint arrays do not match the edge list");
  for (int a = 0; a < na; ++a) {
    if (g.source[a] < 0 || g.source[a] >= nq || g.goal[a] < 0 ||
        g.goal[a] >= nq)
      throw GraphError("edge '" + g.edge_names[a] +
                       "' references an unknown vertex");
  }

  if (g.label_names.empty() != g.label.empty())
    throw GraphError("labelling arrays are inconsistent");
  if (g.labelled()) {
    if (static_cast<int>(g.label.size()) != na)
      throw GraphError("label array does not match the edge list");
    std::unordered_set<std::string> seen;
    for (const auto& name : g.label_names) {
      if (name.empty()) throw GraphError("empty label name");
      if (!seen.insert(name).second)
        throw GraphError("duplicate label name '" + name + "'");
    }
    const int nb = g.label_count();
    for (int a = 0; a < na; ++a) {
      if (g.label[a] < 0 || g.label[a] >= nb)
        throw GraphError("edge '" + g.edge_names[a] +
                         "' references an unknown label");
    }
    // Deterministic labelling: (source vertex, label) determines the edge.
    std::unordered_map<long long, int> first;
    for (int a = 0; a < na; ++a) {
      long long key = static_cast<long long>(g.source[a]) * nb + g.label[a];
      auto [it, fresh] = first.emplace(key, a);
      if (!fresh)
        throw GraphError("nondeterministic labelling: edges " +
                         edge_desc(g, it->second) + " and " + edge_desc(g, a) +
                         " leave '" + g.vertex_names[g.source[a]] +
                         "' with the same label '" +
                         g.label_names[g.label[a]] + "'");
    }
  }

  g.out_edges.assign(nq, {});
  for (int a = 0; a < na; ++a) g.out_edges[g.source[a]].push_back(a);
  return g;
}

DirectedGraph parse_graph(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw GraphError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw GraphError("graph document must be an object");
  if (!doc.contains("vertices") || !doc["vertices"].is_array())
    throw GraphError("graph document needs a \"vertices\" array");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw GraphError("graph document needs an \"edges\" array");

  std::vector<std::string> vertex_names;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_string()) throw GraphError("vertex entries must be strings");
    vertex_names.push_back(v.get<std::string>());
  }

  std::vector<std::string> edge_names;
  std::vector<int> source, goal;
  std::vector<std::string> label_names;
  std::vector<int> label;
  std::unordered_map<std::string, int> vertex_index;
  for (int q = 0; q < static_cast<int>(vertex_names.size()); ++q)
    vertex_index.emplace(vertex_names[q], q);
  std::unordered_map<std::string, int> label_index;

  bool any_labelled = false, any_unlabelled = false;
  for (const auto& e : doc["edges"]) {
    if (!e.is_object()) throw GraphError("edge entries must be objects");
    for (const char* key : {"id", "from", "to"}) {
      if (!e.contains(key) || !e[key].is_string())
        throw GraphError(std::string("edge needs a string \"") + key +
                         "\" field");
    }
    edge_names.push_back(e["id"].get<std::string>());
    for (const char* key : {"from", "to"}) {
      const std::string name = e[key].get<std::string>();
      auto it = vertex_index.find(name);
      if (it == vertex_index.end())
        throw GraphError("edge '" + edge_names.back() +
                         "' references unknown vertex '" + name + "'");
      (key[0] == 'f' ? source : goal).push_back(it->second);
    }
    if (e.contains("label")) {
      if (!e["label"].is_string())
        throw GraphError("edge \"label\" must be a string");
      any_labelled = true;
      const std::string name = e["label"].get<std::string>();
      auto [it, fresh] =
          label_index.emplace(name, static_cast<int>(label_names.size()));
      if (fresh) label_names.push_back(name);
      label.push_back(it->second);
    } else {
      any_unlabelled = true;
    }
  }
  if (any_labelled && any_unlabelled)
    throw GraphError(
        "either every edge carries a \"label\" or none does; mixing is not "
        "allowed");

  DirectedGraph g =
      make_graph(std::move(vertex_names), std::move(edge_names),
                 std::move(source), std::move(goal), std::move(label_names),
                 std::move(label));

  if (doc.contains("expected")) {
    if (!doc["expected"].is_object())
      throw GraphError("\"expected\" must be an object of named numbers");
    for (const auto& [key, value] : doc["expected"].items()) {
      if (!value.is_number())
        throw GraphError("expected value '" + key + "' must be a number");
      g.expected[key] = value.get<double>();
    }
  }
  return g;
}

DirectedGraph parse_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphError("cannot open graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

namespace {

// Vertices reachable from q along directed edges (q itself included).
std::vector<char> forward_reachable(const DirectedGraph& g, int q) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::deque<int> queue{q};
  seen[q] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int a : g.out_edges[v]) {
      if (!seen[g.goal[a]]) {
        seen[g.goal[a]] = 1;
        queue.push_back(g.goal[a]);
      }
    }
  }
  return seen;
}

}  // namespace

std::optional<std::pair<int, int>> unreachable_pair(const DirectedGraph& g) {
  for (int q = 0; q < g.vertex_count(); ++q) {
    std::vector<char> seen = forward_reachable(g, q);
    for (int q_prime = 0; q_prime < g.vertex_count(); ++q_prime) {
      if (!seen[q_prime]) return std::make_pair(q, q_prime);
    }
  }
  return std::nullopt;
}

bool is_connected(const DirectedGraph& g) {
  return !unreachable_pair(g).has_value();
}

void require_connected(const DirectedGraph& g) {
  if (auto bad = unreachable_pair(g)) {
    throw GraphError("graph is not strongly connected: no path from '" +
                     g.vertex_names[bad->first] + "' to '" +
                     g.vertex_names[bad->second] + "'");
  }
}

PeriodData compute_period(const DirectedGraph& g) {
  // BFS potentials from vertex 0: every edge contributes the discrepancy
  // pot(source) + 1 - pot(goal); their gcd is the period, and the potentials
  // reduced mod p give a consistent phase map.
  const int nq = g.vertex_count();
  std::vector<long long> pot(nq, -1);
  std::deque<int> queue{0};
  pot[0] = 0;
  long long p = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int a : g.out_edges[v]) {
      int u = g.goal[a];
      if (pot[u] < 0) {
        pot[u] = pot[v] + 1;
        queue.push_back(u);
      } else {
        p = std::gcd(p, pot[v] + 1 - pot[u]);
      }
    }
  }
  if (p == 0) p = 1;  // no cycle among reached edges; degenerate but total

  PeriodData pd;
  pd.p = static_cast<int>(p);
  pd.phase.assign(nq, 0);
  for (int q = 0; q < nq; ++q) {
    if (pot[q] > 0) pd.phase[q] = static_cast<int>(pot[q] % p);
  }
  return pd;
}

bool is_cyclic(const DirectedGraph& g) {
  for (const auto& out : g.out_edges) {
    if (out.size() != 1) return false;
  }
  return true;
}

bool ReachTable::may_reach(int q, int q_prime, long long m) const {
  if (m < 0) return false;
  int ml = min_length_mod(q, q_prime, static_cast<int>(m % p));
  return ml >= 0 && ml <= m;
}

ReachTable build_reach_table(const DirectedGraph& g, const PeriodData& pd) {
  // For each target q', a backward BFS on the layered state space
  // (vertex, length mod p); BFS depth is the exact minimum length because
  // every edge advances the length by one.
  const int nq = g.vertex_count();
  const int p = pd.p;
  ReachTable table;
  table.p = p;
  table.vertex_count = nq;
  table.min_len.assign(static_cast<size_t>(nq) * nq * p, -1);

  std::vector<std::vector<int>> in_edges(nq);
  for (int a = 0; a < g.edge_count(); ++a) in_edges[g.goal[a]].push_back(a);

  std::vector<int> dist(static_cast<size_t>(nq) * p);
  for (int q_prime = 0; q_prime < nq; ++q_prime) {
    std::fill(dist.begin(), dist.end(), -1);
    std::deque<int> queue;
    dist[static_cast<size_t>(q_prime) * p] = 0;
    queue.push_back(q_prime * p);
    while (!queue.empty()) {
      int state = queue.front();
      queue.pop_front();
      int v = state / p, j = state % p;
      int d = dist[state];
      for (int a : in_edges[v]) {
        int u = g.source[a];
        int next = u * p + (j + 1) % p;
        if (dist[next] < 0) {
          dist[next] = d + 1;
          queue.push_back(next);
        }
      }
    }
    for (int q = 0; q < nq; ++q) {
      for (int j = 0; j < p; ++j) {
        table.min_len[(static_cast<size_t>(q) * nq + q_prime) * p + j] =
            dist[static_cast<size_t>(q) * p + j];
      }
    }
  }
  return table;
}

namespace {

struct PathDfs {
  const DirectedGraph& g;
  const ReachTable& reach;
  int q_prime;
  const std::function<void(const Word&)>& visit;
  Word buffer;

  void run(size_t pos, int at) {
    if (pos == buffer.size()) {
      if (at == q_prime) visit(buffer);
      return;
    }
    const long long remaining = static_cast<long long>(buffer.size() - pos);
    for (int a : g.out_edges[at]) {
      int u = g.goal[a];
      if (!reach.may_reach(u, q_prime, remaining - 1)) continue;
      buffer[pos] = a;
      run(pos + 1, u);
    }
  }
};

void check_endpoints(const DirectedGraph& g, int q, int q_prime) {
  if (q < 0 || q >= g.vertex_count() || q_prime < 0 ||
      q_prime >= g.vertex_count())
    throw GraphError("path endpoint is not a vertex of the graph");
}

}  // namespace

void for_each_path(const DirectedGraph& g, const ReachTable& reach, int n,
                   int q, int q_prime,
                   const std::function<void(const Word&)>& visit) {
  check_endpoints(g, q, q_prime);
  if (n < 0) throw UsageError("path length must be nonnegative");
  PathDfs dfs{g, reach, q_prime, visit, Word(static_cast<size_t>(n))};
  dfs.run(0, q);
}

std::vector<Word> enumerate_paths(const DirectedGraph& g, int n, int q,
                                  int q_prime, int threads) {
  check_endpoints(g, q, q_prime);
  if (n < 0) throw UsageError("path length must be nonnegative");
  PeriodData pd = compute_period(g);
  ReachTable reach = build_reach_table(g, pd);

  if (threads <= 1 || n == 0) {
    std::vector<Word> out;
    for_each_path(g, reach, n, q, q_prime,
                  [&out](const Word& w) { out.push_back(w); });
    return out;
  }

  // Partition the search on the first edge; concatenating the per-edge
  // results in edge order reproduces the single-threaded order exactly.
  std::vector<std::future<std::vector<Word>>> parts;
  for (int a : g.out_edges[q]) {
    if (!reach.may_reach(g.goal[a], q_prime, n - 1)) continue;
    parts.push_back(std::async(std::launch::async, [&, a]() {
      std::vector<Word> out;
      for_each_path(g, reach, n - 1, g.goal[a], q_prime, [&](const Word& w) {
        Word full;
        full.reserve(w.size() + 1);
        full.push_back(a);
        full.insert(full.end(), w.begin(), w.end());
        out.push_back(std::move(full));
      });
      return out;
    }));
  }
  std::vector<Word> out;
  for (auto& part : parts) {
    std::vector<Word> piece = part.get();
    out.insert(out.end(), std::make_move_iterator(piece.begin()),
               std::make_move_iterator(piece.end()));
  }
  return out;
}

std::vector<long long> occurrence(const Word& w, const DirectedGraph& g) {
  std::vector<long long> counts(g.edge_count(), 0);
  for (size_t k = 0; k < w.size(); ++k) {
    int a = w[k];
    if (a < 0 || a >= g.edge_count())
      throw GraphError("word references an unknown edge");
    if (k > 0 && g.source[a] != g.goal[w[k - 1]])
      throw GraphError("word is not an admissible path");
    ++counts[a];
  }
  return counts;
}

std::vector<int> project_word(const Word& w, const DirectedGraph& g) {
  if (!g.labelled())
    throw GraphError("graph carries no labelling to project onto");
  std::vector<int> labels;
  labels.reserve(w.size());
  for (size_t k = 0; k < w.size(); ++k) {
    int a = w[k];
    if (a < 0 || a >= g.edge_count())
      throw GraphError("word references an unknown edge");
    if (k > 0 && g.source[a] != g.goal[w[k - 1]])
      throw GraphError("word is not an admissible path");
    labels.push_back(g.label[a]);
  }
  return labels;
}

}  // namespace dircount
