#include "anm/graphs.hpp"

#include "anm/errors.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace anm {

NodeMask node_mask(std::initializer_list<int> nodes) {
    return node_mask(std::span<const int>(nodes.begin(), nodes.size()));
}

NodeMask node_mask(std::span<const int> nodes) {
    NodeMask m = 0;
    for (int v : nodes) {
        if (v < 0 || v >= kMaxNodes) throw std::invalid_argument("node index out of range");
        m |= bit(v);
    }
    return m;
}

std::vector<int> mask_nodes(NodeMask m) {
    std::vector<int> out;
    while (m != 0) {
        out.push_back(std::countr_zero(m));
        m &= m - 1;
    }
    return out;
}

int popcount(NodeMask m) { return std::popcount(m); }

namespace {

void check_node_count(int p) {
    if (p < 1 || p > kMaxNodes) {
        throw std::invalid_argument("node count must be in [1, 64], got " + std::to_string(p));
    }
}

void check_edge(const Edge& e, int p) {
    if (e.from < 0 || e.from >= p || e.to < 0 || e.to >= p) {
        throw std::invalid_argument("edge " + std::to_string(e.from) + " -> " +
                                    std::to_string(e.to) + " out of range for p=" +
                                    std::to_string(p));
    }
    if (e.from == e.to) {
        throw std::invalid_argument("self-loop at node " + std::to_string(e.from));
    }
}

// Kahn's algorithm on parent masks; returns the order or an empty vector on a cycle.
std::vector<int> kahn(const std::vector<NodeMask>& parents) {
    const int p = static_cast<int>(parents.size());
    std::vector<int> order;
    order.reserve(parents.size());
    NodeMask placed = 0;
    while (static_cast<int>(order.size()) < p) {
        bool progress = false;
        for (int v = 0; v < p; ++v) {
            if (!contains(placed, v) && (parents[v] & ~placed) == 0) {
                order.push_back(v);
                placed |= bit(v);
                progress = true;
            }
        }
        if (!progress) return {};
    }
    return order;
}

bool acyclic_masks(const std::vector<NodeMask>& parents) {
    return parents.empty() || !kahn(parents).empty();
}

}  // namespace

bool is_acyclic(std::span<const Edge> edges, int p) {
    check_node_count(p);
    std::vector<NodeMask> parents(static_cast<std::size_t>(p), 0);
    for (const Edge& e : edges) {
        check_edge(e, p);
        parents[e.to] |= bit(e.from);
    }
    return acyclic_masks(parents);
}

// ---------------------------------------------------------------- Dag

Dag::Dag(int p) : p_(p) {
    check_node_count(p);
    parents_.assign(static_cast<std::size_t>(p), 0);
}

Dag::Dag(int p, std::span<const Edge> edges) : Dag(p) {
    for (const Edge& e : edges) {
        check_edge(e, p);
        if (has_edge(e.from, e.to)) {
            throw std::invalid_argument("duplicate edge " + std::to_string(e.from) + " -> " +
                                        std::to_string(e.to));
        }
        parents_[e.to] |= bit(e.from);
    }
    if (!acyclic_masks(parents_)) throw std::invalid_argument("edge set contains a directed cycle");
}

Dag::Dag(int p, std::vector<NodeMask> parents) : p_(p), parents_(std::move(parents)) {}

Dag Dag::from_parents(std::vector<NodeMask> parents) {
    const int p = static_cast<int>(parents.size());
    check_node_count(p);
    const NodeMask all = p == 64 ? ~NodeMask{0} : bit(p) - 1;
    for (int v = 0; v < p; ++v) {
        if ((parents[v] & ~all) != 0 || contains(parents[v], v)) {
            throw std::invalid_argument("invalid parent mask for node " + std::to_string(v));
        }
    }
    if (!acyclic_masks(parents)) throw std::invalid_argument("parent masks contain a directed cycle");
    return Dag(p, std::move(parents));
}

NodeMask Dag::children(int node) const {
    NodeMask m = 0;
    for (int v = 0; v < p_; ++v) {
        if (contains(parents_[v], node)) m |= bit(v);
    }
    return m;
}

int Dag::edge_count() const {
    int c = 0;
    for (NodeMask m : parents_) c += std::popcount(m);
    return c;
}

std::vector<Edge> Dag::edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < p_; ++i) {
        for (int j = 0; j < p_; ++j) {
            if (has_edge(i, j)) out.push_back({i, j});
        }
    }
    return out;
}

std::vector<int> Dag::topological_order() const { return kahn(parents_); }

NodeMask Dag::descendants(int node) const {
    NodeMask seen = 0;
    NodeMask frontier = children(node);
    while (frontier != 0) {
        const int v = std::countr_zero(frontier);
        frontier &= frontier - 1;
        if (contains(seen, v)) continue;
        seen |= bit(v);
        frontier |= children(v) & ~seen;
    }
    return seen;
}

NodeMask Dag::ancestors_of(NodeMask set) const {
    NodeMask seen = set;
    NodeMask frontier = set;
    while (frontier != 0) {
        const int v = std::countr_zero(frontier);
        frontier &= frontier - 1;
        const NodeMask fresh = parents_[v] & ~seen;
        seen |= fresh;
        frontier |= fresh;
    }
    return seen;
}

Dag Dag::without_edges_from(int node) const {
    std::vector<NodeMask> parents = parents_;
    for (NodeMask& m : parents) m &= ~bit(node);
    return Dag(p_, std::move(parents));
}

bool edge_set_less(const Dag& a, const Dag& b) {
    const auto ea = a.edges();
    const auto eb = b.edges();
    return std::lexicographical_compare(ea.begin(), ea.end(), eb.begin(), eb.end());
}

// ---------------------------------------------------------------- Pdag

Pdag::Pdag(int p) : p_(p) {
    check_node_count(p);
    parents_.assign(static_cast<std::size_t>(p), 0);
    undirected_.assign(static_cast<std::size_t>(p), 0);
}

Pdag::Pdag(int p, std::span<const Edge> directed, std::span<const Edge> undirected) : Pdag(p) {
    for (const Edge& e : directed) add_directed(e.from, e.to);
    for (const Edge& e : undirected) add_undirected(e.from, e.to);
}

Pdag Pdag::from_dag(const Dag& g) {
    Pdag out(g.size());
    out.parents_ = g.parent_masks();
    return out;
}

void Pdag::check_pair(int a, int b) const {
    check_edge(Edge{a, b}, p_);
    if (adjacent(a, b)) {
        throw std::invalid_argument("pair " + std::to_string(a) + "," + std::to_string(b) +
                                    " already carries an edge");
    }
}

void Pdag::add_directed(int from, int to) {
    check_pair(from, to);
    parents_[to] |= bit(from);
}

void Pdag::add_undirected(int a, int b) {
    check_pair(a, b);
    undirected_[a] |= bit(b);
    undirected_[b] |= bit(a);
}

void Pdag::orient(int from, int to) {
    if (!has_undirected(from, to)) throw std::invalid_argument("orient: no undirected edge");
    undirected_[from] &= ~bit(to);
    undirected_[to] &= ~bit(from);
    parents_[to] |= bit(from);
}

bool Pdag::adjacent(int a, int b) const {
    return has_directed(a, b) || has_directed(b, a) || has_undirected(a, b);
}

EdgeType Pdag::edge_type(int a, int b) const {
    if (has_undirected(a, b)) return EdgeType::undirected;
    if (has_directed(a, b)) return EdgeType::forward;
    if (has_directed(b, a)) return EdgeType::backward;
    return EdgeType::none;
}

std::vector<Edge> Pdag::directed_edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < p_; ++i) {
        for (int j = 0; j < p_; ++j) {
            if (has_directed(i, j)) out.push_back({i, j});
        }
    }
    return out;
}

std::vector<Edge> Pdag::undirected_edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < p_; ++i) {
        for (int j = i + 1; j < p_; ++j) {
            if (has_undirected(i, j)) out.push_back({i, j});
        }
    }
    return out;
}

bool Pdag::is_fully_directed() const {
    return std::all_of(undirected_.begin(), undirected_.end(), [](NodeMask m) { return m == 0; });
}

Dag Pdag::to_dag() const {
    if (!is_fully_directed()) throw std::invalid_argument("graph has undirected edges");
    return Dag::from_parents(parents_);
}

// ---------------------------------------------------------------- enumeration

std::uint64_t count_dags(int p) {
    if (p < 0 || p > 10) throw std::invalid_argument("count_dags supports 0 <= p <= 10");
    std::vector<__int128> a(static_cast<std::size_t>(p) + 1, 0);
    a[0] = 1;
    for (int m = 1; m <= p; ++m) {
        __int128 total = 0;
        __int128 binom = 1;  // C(m, k)
        for (int k = 1; k <= m; ++k) {
            binom = binom * (m - k + 1) / k;
            const __int128 term = binom * (static_cast<__int128>(1) << (k * (m - k))) * a[m - k];
            total += (k % 2 == 1) ? term : -term;
        }
        a[m] = total;
    }
    return static_cast<std::uint64_t>(a[p]);
}

std::vector<Dag> enumerate_dags(int p, int cap) {
    check_node_count(p);
    if (p > cap) {
        throw RefusalError("refusing to enumerate DAGs on " + std::to_string(p) + " nodes (cap " +
                           std::to_string(cap) + "); the count grows super-exponentially, e.g. " +
                           std::to_string(count_dags(std::min(p, 10))) + " labeled DAGs");
    }
    // each unordered pair is none / i->j / j->i
    std::vector<Edge> pairs;
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) pairs.push_back({i, j});
    }
    std::vector<Dag> out;
    out.reserve(count_dags(p));
    std::vector<int> state(pairs.size(), 0);
    std::vector<NodeMask> parents(static_cast<std::size_t>(p), 0);
    while (true) {
        std::fill(parents.begin(), parents.end(), 0);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            if (state[k] == 1) parents[pairs[k].to] |= bit(pairs[k].from);
            if (state[k] == 2) parents[pairs[k].from] |= bit(pairs[k].to);
        }
        if (acyclic_masks(parents)) out.push_back(Dag::from_parents(parents));
        std::size_t k = 0;
        while (k < state.size() && state[k] == 2) state[k++] = 0;
        if (k == state.size()) break;
        ++state[k];
    }
    return out;
}

// ---------------------------------------------------------------- neighborhood

std::vector<EdgeEdit> legal_edits(const Dag& g) {
    const int p = g.size();
    std::vector<EdgeEdit> out;
    auto parents = g.parent_masks();
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i == j) continue;
            if (g.has_edge(i, j)) {
                out.push_back({EdgeEdit::Kind::remove, {i, j}});
                parents[j] &= ~bit(i);
                parents[i] |= bit(j);
                if (acyclic_masks(parents)) out.push_back({EdgeEdit::Kind::reverse, {i, j}});
                parents[i] &= ~bit(j);
                parents[j] |= bit(i);
            } else if (!g.has_edge(j, i)) {
                parents[j] |= bit(i);
                if (acyclic_masks(parents)) out.push_back({EdgeEdit::Kind::add, {i, j}});
                parents[j] &= ~bit(i);
            }
        }
    }
    return out;
}

Dag apply_edit(const Dag& g, const EdgeEdit& edit) {
    auto parents = g.parent_masks();
    const auto [i, j] = edit.edge;
    switch (edit.kind) {
        case EdgeEdit::Kind::add:
            parents[j] |= bit(i);
            break;
        case EdgeEdit::Kind::remove:
            parents[j] &= ~bit(i);
            break;
        case EdgeEdit::Kind::reverse:
            parents[j] &= ~bit(i);
            parents[i] |= bit(j);
            break;
    }
    return Dag::from_parents(std::move(parents));
}

std::vector<Dag> neighbors(const Dag& g) {
    std::vector<Dag> out;
    for (const EdgeEdit& e : legal_edits(g)) out.push_back(apply_edit(g, e));
    return out;
}

// ---------------------------------------------------------------- d-separation

bool d_separated(const Dag& g, NodeMask a, NodeMask b, NodeMask s) {
    if ((a & b) != 0 || (a & s) != 0 || (b & s) != 0) {
        throw std::invalid_argument("d_separated: node sets must be pairwise disjoint");
    }
    const int p = g.size();
    const NodeMask anc = g.ancestors_of(s);
    std::vector<NodeMask> children(static_cast<std::size_t>(p));
    for (int v = 0; v < p; ++v) children[v] = g.children(v);

    // visited[0]: arrived from a child (moving up); visited[1]: from a parent
    NodeMask visited[2] = {0, 0};
    std::vector<std::pair<int, int>> stack;
    for (int v : mask_nodes(a)) stack.emplace_back(v, 0);
    NodeMask reachable = 0;
    while (!stack.empty()) {
        const auto [v, dir] = stack.back();
        stack.pop_back();
        if (contains(visited[dir], v)) continue;
        visited[dir] |= bit(v);
        const bool observed = contains(s, v);
        if (!observed) reachable |= bit(v);
        if (dir == 0) {
            if (observed) continue;
            for (int u : mask_nodes(g.parents(v))) stack.emplace_back(u, 0);
            for (int u : mask_nodes(children[v])) stack.emplace_back(u, 1);
        } else {
            if (!observed) {
                for (int u : mask_nodes(children[v])) stack.emplace_back(u, 1);
            }
            if (contains(anc, v)) {
                for (int u : mask_nodes(g.parents(v))) stack.emplace_back(u, 0);
            }
        }
    }
    return (reachable & b) == 0;
}

// ---------------------------------------------------------------- CPDAG

namespace {

// Meek rules R1-R3; R4 never fires when the only background knowledge is
// the set of immoralities.
bool apply_meek(Pdag& c) {
    const int p = c.size();
    bool changed = false;
    for (int x = 0; x < p; ++x) {
        for (int y = 0; y < p; ++y) {
            if (!c.has_undirected(x, y)) continue;
            bool orient = false;
            // R1: z -> x - y, z and y non-adjacent
            for (int z : mask_nodes(c.parents(x))) {
                if (z != y && !c.adjacent(z, y)) {
                    orient = true;
                    break;
                }
            }
            // R2: x -> z -> y with x - y
            if (!orient) {
                for (int z : mask_nodes(c.parents(y))) {
                    if (c.has_directed(x, z)) {
                        orient = true;
                        break;
                    }
                }
            }
            // R3: x - z1 -> y, x - z2 -> y, z1 and z2 non-adjacent
            if (!orient) {
                const auto mids = mask_nodes(c.undirected_neighbors(x) & c.parents(y));
                for (std::size_t a = 0; a < mids.size() && !orient; ++a) {
                    for (std::size_t b = a + 1; b < mids.size(); ++b) {
                        if (!c.adjacent(mids[a], mids[b])) {
                            orient = true;
                            break;
                        }
                    }
                }
            }
            if (orient) {
                c.orient(x, y);
                changed = true;
            }
        }
    }
    return changed;
}

}  // namespace

Pdag cpdag(const Dag& g) {
    const int p = g.size();
    NodeMask compelled[kMaxNodes] = {};
    for (int v = 0; v < p; ++v) {
        const auto pa = mask_nodes(g.parents(v));
        for (std::size_t a = 0; a < pa.size(); ++a) {
            for (std::size_t b = a + 1; b < pa.size(); ++b) {
                if (!g.adjacent(pa[a], pa[b])) {
                    compelled[v] |= bit(pa[a]) | bit(pa[b]);
                }
            }
        }
    }
    Pdag c(p);
    for (const Edge& e : g.edges()) {
        if (contains(compelled[e.to], e.from)) {
            c.add_directed(e.from, e.to);
        } else {
            c.add_undirected(e.from, e.to);
        }
    }
    while (apply_meek(c)) {
    }
    return c;
}

std::vector<Dag> dag_extensions(const Pdag& c) {
    const auto undirected = c.undirected_edges();
    if (undirected.size() > 20) {
        throw RefusalError("dag_extensions: too many undirected edges to enumerate");
    }
    std::vector<Dag> out;
    const std::uint64_t combos = std::uint64_t{1} << undirected.size();
    for (std::uint64_t code = 0; code < combos; ++code) {
        auto parents = std::vector<NodeMask>(static_cast<std::size_t>(c.size()));
        for (int v = 0; v < c.size(); ++v) parents[v] = c.parents(v);
        for (std::size_t k = 0; k < undirected.size(); ++k) {
            const auto [a, b] = undirected[k];
            if ((code >> k) & 1U) {
                parents[a] |= bit(b);
            } else {
                parents[b] |= bit(a);
            }
        }
        if (!acyclic_masks(parents)) continue;
        Dag d = Dag::from_parents(std::move(parents));
        if (cpdag(d) == c) out.push_back(std::move(d));
    }
    if (out.empty()) {
        throw StructuralError("PDAG is not a CPDAG: no consistent DAG extension");
    }
    return out;
}

// ---------------------------------------------------------------- text format

Pdag read_graph(std::istream& in) {
    std::string line;
    int line_no = 0;
    int p = -1;
    std::vector<Edge> directed;
    std::vector<Edge> undirected;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("graph text line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (p < 0) {
            if (line.rfind("p=", 0) != 0) fail("expected header 'p=<int>'");
            try {
                std::size_t used = 0;
                p = std::stoi(line.substr(2), &used);
                if (line.substr(2 + used).find_first_not_of(" \t") != std::string::npos) {
                    fail("trailing characters after node count");
                }
            } catch (const std::logic_error&) {
                fail("malformed node count");
            }
            continue;
        }
        std::istringstream ls(line);
        int a = 0;
        int b = 0;
        std::string arrow;
        std::string rest;
        if (!(ls >> a >> arrow >> b) || (ls >> rest)) fail("expected 'i -> j' or 'i -- j'");
        if (arrow == "->") {
            directed.push_back({a, b});
        } else if (arrow == "--") {
            undirected.push_back({a, b});
        } else {
            fail("unknown edge token '" + arrow + "'");
        }
    }
    if (p < 0) throw std::invalid_argument("graph text: missing 'p=<int>' header");
    return Pdag(p, directed, undirected);
}

Pdag read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file " + path);
    return read_graph(in);
}

void write_graph(std::ostream& out, const Pdag& g) {
    out << "p=" << g.size() << '\n';
    for (const Edge& e : g.directed_edges()) out << e.from << " -> " << e.to << '\n';
    for (const Edge& e : g.undirected_edges()) out << e.from << " -- " << e.to << '\n';
}

void write_graph(std::ostream& out, const Dag& g) { write_graph(out, Pdag::from_dag(g)); }

void write_graph_file(const std::string& path, const Dag& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file " + path);
    write_graph(out, g);
}

std::string to_string(const Dag& g) {
    std::ostringstream os;
    write_graph(os, g);
    return os.str();
}

}  // namespace anm
