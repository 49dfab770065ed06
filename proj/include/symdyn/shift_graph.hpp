#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "symdyn/error.hpp"

namespace symdyn {

struct StateId {
    std::string label;

    StateId() = default;
    StateId(std::string s) : label(std::move(s)) {}
    StateId(const char* s) : label(s) {}

    auto operator<=>(const StateId&) const = default;
    bool operator==(const StateId&) const = default;
};

struct StateIdHash {
    std::size_t operator()(const StateId& s) const noexcept { return std::hash<std::string>{}(s.label); }
};

std::vector<StateId> parse_state_list(const std::string& comma_separated);
std::string join_states(const std::vector<StateId>& states, const char* sep = ",");

class ShiftGraph;

// An admissible path of states; edge_count = size - 1.
class Word {
public:
    Word(const ShiftGraph& g, std::vector<StateId> symbols);

    const std::vector<StateId>& symbols() const { return symbols_; }
    std::size_t edge_count() const { return symbols_.size() - 1; }
    const StateId& front() const { return symbols_.front(); }
    const StateId& back() const { return symbols_.back(); }

private:
    std::vector<StateId> symbols_;
};

// Future cylinder [root, future_1, ..., future_N].
struct Cylinder {
    StateId root;
    std::vector<StateId> future;

    std::size_t depth() const { return future.size(); }
    const StateId& last() const { return future.empty() ? root : future.back(); }
};

class ShiftGraph {
public:
    enum class Kind { finite, generated };

    using NeighborFn = std::function<std::vector<StateId>(const StateId&)>;
    using ValidFn = std::function<bool(const StateId&)>;

    struct GeneratorDef {
        std::string name;
        nlohmann::json params;
        StateId base;
        int degree_bound = 0;
        ValidFn valid;
        NeighborFn successors;
        NeighborFn predecessors;
        // Set when the generator has finitely many states.
        std::optional<std::vector<StateId>> all_states;
    };

    static ShiftGraph finite(std::vector<StateId> states,
                             const std::vector<std::pair<StateId, StateId>>& edges,
                             std::optional<StateId> base = std::nullopt,
                             std::optional<int> degree_bound = std::nullopt);
    static ShiftGraph generated(GeneratorDef def);

    Kind kind() const;
    const std::string& name() const;
    const StateId& base() const;
    int degree_bound() const;

    bool contains(const StateId& s) const;
    void require(const StateId& s) const;  // throws UnknownState
    const std::vector<StateId>& successors(const StateId& s) const;
    const std::vector<StateId>& predecessors(const StateId& s) const;
    bool has_edge(const StateId& a, const StateId& b) const;

    // True for finite graphs and for generators with finitely many states.
    bool has_finite_closure() const;
    // All states, in canonical order; throws for infinite generators.
    const std::vector<StateId>& all_states() const;

    nlohmann::json description() const;

private:
    struct Impl;
    explicit ShiftGraph(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

ShiftGraph make_renewal(int max_loop);
ShiftGraph make_ladder();
ShiftGraph make_full_shift(int k);

std::string renewal_label(int n, int k);
std::string ladder_label(int n, int c);

// {"kind":"finite",...} or {"kind":"generator","name":...,"params":{...}}
ShiftGraph build_graph(const nlohmann::json& spec);

enum class Direction { forward, backward };

// States reachable from (forward) or reaching (backward) the sources within
// radius steps, materialized with dense indices. Edges leaving the region are
// dropped.
struct LocalGraph {
    std::vector<StateId> states;
    std::unordered_map<StateId, int, StateIdHash> index;
    std::vector<std::vector<int>> succ;
    std::vector<std::vector<int>> pred;
    std::vector<int> distance;

    int find(const StateId& s) const {
        auto it = index.find(s);
        return it == index.end() ? -1 : it->second;
    }
    std::size_t size() const { return states.size(); }
};

LocalGraph explore(const ShiftGraph& g, const std::vector<StateId>& sources, int radius, Direction dir);
LocalGraph materialize(const ShiftGraph& g, const std::vector<StateId>& states);

std::set<StateId> ball(const ShiftGraph& g, const StateId& center, int radius);

struct GraphReport {
    int max_out_degree = 0;
    int max_in_degree = 0;
    bool transitive_on_ball = false;
    std::size_t states_checked = 0;
};

GraphReport validate_graph(const ShiftGraph& g, int radius);

bool is_admissible(const ShiftGraph& g, const std::vector<StateId>& symbols);

}  // namespace symdyn

template <>
struct std::hash<symdyn::StateId> : symdyn::StateIdHash {};
