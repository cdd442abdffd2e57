#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace anm {

/// Node sets are bit masks over positional node indices.
using NodeMask = std::uint64_t;
inline constexpr int kMaxNodes = 64;
/// Exhaustive enumeration is refused above this node count unless overridden.
inline constexpr int kDefaultEnumerationCap = 5;

inline constexpr NodeMask bit(int i) { return NodeMask{1} << i; }
inline constexpr bool contains(NodeMask m, int i) { return (m >> i) & 1U; }
NodeMask node_mask(std::initializer_list<int> nodes);
NodeMask node_mask(std::span<const int> nodes);
std::vector<int> mask_nodes(NodeMask m);
int popcount(NodeMask m);

struct Edge {
    int from = 0;
    int to = 0;
    auto operator<=>(const Edge&) const = default;
};

/// True iff the directed graph on nodes 0..p-1 has a topological order.
/// Throws std::invalid_argument on self-loops or out-of-range nodes.
bool is_acyclic(std::span<const Edge> edges, int p);

/// Directed acyclic graph over nodes 0..p-1. Values are immutable; edits
/// return new graphs.
class Dag {
public:
    explicit Dag(int p);
    /// Throws std::invalid_argument on self-loops, out-of-range nodes,
    /// duplicated pairs or a directed cycle.
    Dag(int p, std::span<const Edge> edges);
    Dag(int p, std::initializer_list<Edge> edges)
        : Dag(p, std::span<const Edge>(edges.begin(), edges.size())) {}
    /// Builds from per-node parent masks; throws on cycles.
    static Dag from_parents(std::vector<NodeMask> parents);

    int size() const { return p_; }
    bool has_edge(int from, int to) const { return contains(parents_[to], from); }
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }
    NodeMask parents(int node) const { return parents_[node]; }
    NodeMask children(int node) const;
    const std::vector<NodeMask>& parent_masks() const { return parents_; }
    int edge_count() const;
    /// Edges in lexicographic (from, to) order.
    std::vector<Edge> edges() const;
    std::vector<int> topological_order() const;
    /// Strict descendants of node.
    NodeMask descendants(int node) const;
    /// Ancestors of the set, including the set itself.
    NodeMask ancestors_of(NodeMask set) const;

    Dag without_edges_from(int node) const;

    bool operator==(const Dag&) const = default;

private:
    Dag(int p, std::vector<NodeMask> parents);
    int p_;
    std::vector<NodeMask> parents_;
};

/// Lexicographic order on the sorted edge lists; used for deterministic
/// tie-breaking.
bool edge_set_less(const Dag& a, const Dag& b);

enum class EdgeType { none, forward, backward, undirected };

/// Partially directed graph: directed edges plus undirected edges.
class Pdag {
public:
    explicit Pdag(int p);
    Pdag(int p, std::span<const Edge> directed, std::span<const Edge> undirected);
    static Pdag from_dag(const Dag& g);

    int size() const { return p_; }
    bool has_directed(int from, int to) const { return contains(parents_[to], from); }
    bool has_undirected(int a, int b) const { return contains(undirected_[a], b); }
    bool adjacent(int a, int b) const;
    /// Edge type of the pair read as (a, b): forward means a -> b.
    EdgeType edge_type(int a, int b) const;
    NodeMask parents(int node) const { return parents_[node]; }
    NodeMask undirected_neighbors(int node) const { return undirected_[node]; }
    std::vector<Edge> directed_edges() const;
    /// Undirected edges as (a, b) with a < b.
    std::vector<Edge> undirected_edges() const;
    bool is_fully_directed() const;
    /// Throws std::invalid_argument when undirected edges remain or the
    /// directed part is cyclic.
    Dag to_dag() const;

    void add_directed(int from, int to);
    void add_undirected(int a, int b);
    void orient(int from, int to);

    bool operator==(const Pdag&) const = default;

private:
    void check_pair(int a, int b) const;
    int p_;
    std::vector<NodeMask> parents_;
    std::vector<NodeMask> undirected_;
};

/// Number of labeled DAGs on p nodes (p <= 10), by the alternating-sum
/// recurrence. Count only; nothing is materialized.
std::uint64_t count_dags(int p);

/// Every labeled DAG on p nodes exactly once. Refuses p above `cap`.
std::vector<Dag> enumerate_dags(int p, int cap = kDefaultEnumerationCap);

struct EdgeEdit {
    enum class Kind { add, remove, reverse };
    Kind kind;
    /// For add: the new edge. For remove/reverse: the existing edge.
    Edge edge;
    /// The node whose parent set the edit changes in the first place.
    int target() const { return edge.to; }
};

/// All single-edge additions, removals and reversals of g that stay acyclic.
std::vector<EdgeEdit> legal_edits(const Dag& g);
Dag apply_edit(const Dag& g, const EdgeEdit& edit);
std::vector<Dag> neighbors(const Dag& g);

/// d-separation of A and B given S (reachability formulation). Throws
/// std::invalid_argument when the sets overlap.
bool d_separated(const Dag& g, NodeMask a, NodeMask b, NodeMask s);

/// Completed PDAG of the Markov equivalence class of g: immoralities
/// oriented, then closed under Meek's rules.
Pdag cpdag(const Dag& g);

/// All DAGs represented by a CPDAG. Throws StructuralError when c is not
/// the CPDAG of any DAG.
std::vector<Dag> dag_extensions(const Pdag& c);

// Graph text format: "p=<int>", then "i -> j" / "i -- j" lines.
Pdag read_graph(std::istream& in);
Pdag read_graph_file(const std::string& path);
void write_graph(std::ostream& out, const Pdag& g);
void write_graph(std::ostream& out, const Dag& g);
void write_graph_file(const std::string& path, const Dag& g);
std::string to_string(const Dag& g);

}  // namespace anm
