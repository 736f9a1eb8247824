// Directed multigraphs (Q, A, sigma, gamma) with an optional deterministic
// edge labelling, JSON parsing, structural checks (connectivity, period,
// cyclicity), and exhaustive path enumeration used as the exact oracle.

#ifndef DIRCOUNT_GRAPH_HPP
#define DIRCOUNT_GRAPH_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dircount {

// A word is an admissible sequence of edge ids: goal(w[k]) == source(w[k+1]).
using Word = std::vector<int>;

// Finite directed multigraph. Vertices and edges are dense ids in document
// order; the edge order fixes the coordinate order of E = R^A everywhere
// downstream. A graph may carry a deterministic labelling pi : A -> B
// (per-vertex injective); labelled() distinguishes the two cases.
struct DirectedGraph {
  std::vector<std::string> vertex_names;  // |Q| entries
  std::vector<std::string> edge_names;    // |A| entries
  std::vector<int> source;                // per edge: sigma(a)
  std::vector<int> goal;                  // per edge: gamma(a)

  std::vector<std::string> label_names;   // |B| entries; empty if unlabelled
  std::vector<int> label;                 // per edge: pi(a); empty if unlabelled

  std::vector<std::vector<int>> out_edges;  // out_edges[q] = edge ids, ascending

  // Optional reference values recorded in the graph document ("expected"
  // object, string -> number). Verification sweeps compare recomputed
  // quantities against these; everything else ignores them.
  std::map<std::string, double> expected;

  int vertex_count() const { return static_cast<int>(vertex_names.size()); }
  int edge_count() const { return static_cast<int>(edge_names.size()); }
  int label_count() const { return static_cast<int>(label_names.size()); }
  bool labelled() const { return !label_names.empty(); }

  int vertex_id(const std::string& name) const;  // -1 if unknown
};

// Builds a validated graph. 'source'/'goal' are vertex ids per edge; labels
// optional (empty vectors for unlabelled). Throws GraphError on structural
// violations (dangling endpoints, empty edge set, nondeterministic labelling,
// duplicate (source, goal, label) multi-edges).
DirectedGraph make_graph(std::vector<std::string> vertex_names,
                         std::vector<std::string> edge_names,
                         std::vector<int> source, std::vector<int> goal,
                         std::vector<std::string> label_names = {},
                         std::vector<int> label = {});

// Parses the JSON document format:
//   {"vertices":["q1","q2"],
//    "edges":[{"id":"a1","from":"q1","to":"q1","label":"b1"}, ...]}
// "label" must be present on all edges or on none. Throws GraphError.
DirectedGraph parse_graph(const std::string& json_text);
DirectedGraph parse_graph_file(const std::string& path);

// Strong connectivity: every ordered vertex pair joined by a path.
bool is_connected(const DirectedGraph& g);

// First ordered pair (q, q') with no path q -> q', if any.
std::optional<std::pair<int, int>> unreachable_pair(const DirectedGraph& g);

// Throws GraphError naming an unreachable pair unless strongly connected.
void require_connected(const DirectedGraph& g);

// Period p = gcd{ n >= 1 : some length-n cycle through q } (the same for all
// q in a strongly connected graph) together with the phase map realizing it:
// phase(gamma(a)) = phase(sigma(a)) + 1 (mod p) for every edge, phase(0) = 0.
struct PeriodData {
  int p = 1;
  std::vector<int> phase;  // per vertex, values in {0, ..., p-1}
};

PeriodData compute_period(const DirectedGraph& g);

// True iff every vertex has out-degree exactly 1 (equivalently lambda(0)=1).
bool is_cyclic(const DirectedGraph& g);

// Minimum-length tables used to prune enumeration: min_length_mod(q, q', j) =
// the least m with m = j (mod p) and a path q -> q' of length exactly m, or -1
// if none exists (then none exists for any m = j mod p).
struct ReachTable {
  int p = 1;
  int vertex_count = 0;
  std::vector<int> min_len;  // index [(q * |Q| + q') * p + j]

  int min_length_mod(int q, int q_prime, int residue) const {
    return min_len[(static_cast<size_t>(q) * vertex_count + q_prime) * p +
                   residue];
  }
  // Necessary condition for a length-m path q -> q': false guarantees none
  // exists, so pruning on it never drops a path.
  bool may_reach(int q, int q_prime, long long m) const;
};

ReachTable build_reach_table(const DirectedGraph& g, const PeriodData& pd);

// Streams every admissible length-n path q -> q' exactly once, in canonical
// lexicographic (edge-id) order. n = 0 yields the empty word iff q == q'.
void for_each_path(const DirectedGraph& g, const ReachTable& reach, int n,
                   int q, int q_prime,
                   const std::function<void(const Word&)>& visit);

// Materialized variant; 'threads' > 1 partitions the search on the first edge
// and concatenates in edge order, so the result is identical to threads = 1.
std::vector<Word> enumerate_paths(const DirectedGraph& g, int n, int q,
                                  int q_prime, int threads = 1);

// Occurrence vector P(w): counts[a] = #occurrences of edge a in w.
// Throws GraphError if w is not admissible or does not fit g.
std::vector<long long> occurrence(const Word& w, const DirectedGraph& g);

// Label sequence (pi(a_1), ..., pi(a_n)). Requires g.labelled().
std::vector<int> project_word(const Word& w, const DirectedGraph& g);

}  // namespace dircount

#endif  // DIRCOUNT_GRAPH_HPP
