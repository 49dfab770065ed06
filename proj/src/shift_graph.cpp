#include "symdyn/shift_graph.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <mutex>
#include <sstream>

namespace symdyn {

std::vector<StateId> parse_state_list(const std::string& s) {
    // Labels may contain commas inside parentheses, e.g. "(1,2)" or "l(3,1)".
    std::vector<StateId> out;
    std::string cur;
    int depth = 0;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            out.emplace_back(cur);
            cur.clear();
        } else if (ch != ' ') {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.emplace_back(cur);
    return out;
}

std::string join_states(const std::vector<StateId>& states, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (i) out += sep;
        out += states[i].label;
    }
    return out;
}

struct ShiftGraph::Impl {
    Kind kind = Kind::finite;
    std::string name;
    StateId base;
    int degree_bound = 0;
    nlohmann::json description;

    // finite
    std::vector<StateId> states;
    std::unordered_map<StateId, std::vector<StateId>, StateIdHash> succ;
    std::unordered_map<StateId, std::vector<StateId>, StateIdHash> pred;

    // generated
    GeneratorDef gen;
    mutable std::mutex cache_mutex;
    mutable std::unordered_map<StateId, std::vector<StateId>, StateIdHash> succ_cache;
    mutable std::unordered_map<StateId, std::vector<StateId>, StateIdHash> pred_cache;

    const std::vector<StateId>& cached(const StateId& s, bool forward) const {
        auto& cache = forward ? succ_cache : pred_cache;
        {
            std::lock_guard<std::mutex> lock(cache_mutex);
            auto it = cache.find(s);
            if (it != cache.end()) return it->second;
        }
        // Generator functions are pure, so racing computations agree.
        auto v = forward ? gen.successors(s) : gen.predecessors(s);
        std::lock_guard<std::mutex> lock(cache_mutex);
        return cache.emplace(s, std::move(v)).first->second;
    }
};

Word::Word(const ShiftGraph& g, std::vector<StateId> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw InvalidInput("word must be nonempty");
    if (!is_admissible(g, symbols_)) throw InvalidInput("inadmissible word (" + join_states(symbols_) + ")");
}

ShiftGraph ShiftGraph::finite(std::vector<StateId> states,
                              const std::vector<std::pair<StateId, StateId>>& edges,
                              std::optional<StateId> base, std::optional<int> degree_bound) {
    if (states.empty()) throw InvalidInput("finite graph needs at least one state");
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::finite;
    impl->name = "finite";
    for (const auto& s : states) {
        if (impl->succ.count(s)) throw InvalidInput("duplicate state label '" + s.label + "'");
        impl->succ[s];
        impl->pred[s];
    }
    for (const auto& [a, b] : edges) {
        if (!impl->succ.count(a)) throw InvalidInput("edge references unknown state '" + a.label + "'");
        if (!impl->succ.count(b)) throw InvalidInput("edge references unknown state '" + b.label + "'");
        auto& out = impl->succ[a];
        if (std::find(out.begin(), out.end(), b) != out.end())
            throw InvalidInput("duplicate edge " + a.label + "->" + b.label);
        out.push_back(b);
        impl->pred[b].push_back(a);
    }
    int maxdeg = 0;
    for (const auto& s : states) {
        maxdeg = std::max<int>(maxdeg, impl->succ[s].size());
        maxdeg = std::max<int>(maxdeg, impl->pred[s].size());
    }
    impl->degree_bound = degree_bound.value_or(std::max(1, maxdeg));
    if (impl->degree_bound < 1) throw InvalidInput("degree_bound must be positive");
    for (const auto& s : states) {
        if (static_cast<int>(impl->succ[s].size()) > impl->degree_bound ||
            static_cast<int>(impl->pred[s].size()) > impl->degree_bound)
            throw StructuralViolation("state '" + s.label + "' exceeds degree bound " +
                                      std::to_string(impl->degree_bound));
    }
    impl->base = base.value_or(states.front());
    if (!impl->succ.count(impl->base)) throw UnknownState(impl->base.label);

    nlohmann::json d;
    d["kind"] = "finite";
    d["states"] = nlohmann::json::array();
    for (const auto& s : states) d["states"].push_back(s.label);
    d["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : edges) d["edges"].push_back({a.label, b.label});
    d["base"] = impl->base.label;
    impl->description = std::move(d);
    impl->states = std::move(states);
    return ShiftGraph(std::move(impl));
}

ShiftGraph ShiftGraph::generated(GeneratorDef def) {
    if (def.degree_bound < 1) throw InvalidInput("degree_bound must be positive");
    if (!def.valid || !def.successors || !def.predecessors) throw InvalidInput("incomplete generator");
    if (!def.valid(def.base)) throw UnknownState(def.base.label);
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::generated;
    impl->name = def.name;
    impl->base = def.base;
    impl->degree_bound = def.degree_bound;
    impl->description = {{"kind", "generator"}, {"name", def.name}, {"params", def.params}};
    impl->gen = std::move(def);
    return ShiftGraph(std::move(impl));
}

ShiftGraph::Kind ShiftGraph::kind() const { return impl_->kind; }
const std::string& ShiftGraph::name() const { return impl_->name; }
const StateId& ShiftGraph::base() const { return impl_->base; }
int ShiftGraph::degree_bound() const { return impl_->degree_bound; }
nlohmann::json ShiftGraph::description() const { return impl_->description; }

bool ShiftGraph::contains(const StateId& s) const {
    if (impl_->kind == Kind::finite) return impl_->succ.count(s) > 0;
    return impl_->gen.valid(s);
}

void ShiftGraph::require(const StateId& s) const {
    if (!contains(s)) throw UnknownState(s.label);
}

const std::vector<StateId>& ShiftGraph::successors(const StateId& s) const {
    if (impl_->kind == Kind::finite) {
        auto it = impl_->succ.find(s);
        if (it == impl_->succ.end()) throw UnknownState(s.label);
        return it->second;
    }
    require(s);
    return impl_->cached(s, true);
}

const std::vector<StateId>& ShiftGraph::predecessors(const StateId& s) const {
    if (impl_->kind == Kind::finite) {
        auto it = impl_->pred.find(s);
        if (it == impl_->pred.end()) throw UnknownState(s.label);
        return it->second;
    }
    require(s);
    return impl_->cached(s, false);
}

bool ShiftGraph::has_edge(const StateId& a, const StateId& b) const {
    const auto& out = successors(a);
    return std::find(out.begin(), out.end(), b) != out.end();
}

bool ShiftGraph::has_finite_closure() const {
    return impl_->kind == Kind::finite || impl_->gen.all_states.has_value();
}

const std::vector<StateId>& ShiftGraph::all_states() const {
    if (impl_->kind == Kind::finite) return impl_->states;
    if (!impl_->gen.all_states) throw InvalidInput("generator '" + impl_->name + "' has infinitely many states");
    return *impl_->gen.all_states;
}

// ---- generators ----

std::string renewal_label(int n, int k) { return "l(" + std::to_string(n) + "," + std::to_string(k) + ")"; }
std::string ladder_label(int n, int c) { return "(" + std::to_string(n) + "," + std::to_string(c) + ")"; }

namespace {

bool parse_pair(const std::string& s, const char* fmt, int& a, int& b) {
    char tail = 0;
    std::string f = std::string(fmt) + "%c";
    return std::sscanf(s.c_str(), f.c_str(), &a, &b, &tail) == 2;
}

bool renewal_parse(const std::string& s, int max_loop, int& n, int& k) {
    if (!parse_pair(s, "l(%d,%d)", n, k)) return false;
    if (renewal_label(n, k) != s) return false;
    return n >= 2 && n <= max_loop && k >= 1 && k <= n - 1;
}

bool ladder_parse(const std::string& s, int& n, int& c) {
    if (!parse_pair(s, "(%d,%d)", n, c)) return false;
    if (ladder_label(n, c) != s) return false;
    return n >= 0 && (c == 1 || c == 2);
}

}  // namespace

ShiftGraph make_renewal(int max_loop) {
    if (max_loop < 2) throw InvalidInput("renewal max_loop must be >= 2");
    ShiftGraph::GeneratorDef def;
    def.name = "renewal";
    def.params = {{"max_loop", max_loop}};
    def.base = StateId("b");
    def.degree_bound = max_loop;
    def.valid = [max_loop](const StateId& s) {
        int n, k;
        return s.label == "b" || renewal_parse(s.label, max_loop, n, k);
    };
    def.successors = [max_loop](const StateId& s) {
        std::vector<StateId> out;
        if (s.label == "b") {
            out.emplace_back("b");
            for (int n = 2; n <= max_loop; ++n) out.emplace_back(renewal_label(n, 1));
            return out;
        }
        int n, k;
        renewal_parse(s.label, max_loop, n, k);
        out.emplace_back(k + 1 < n ? renewal_label(n, k + 1) : std::string("b"));
        return out;
    };
    def.predecessors = [max_loop](const StateId& s) {
        std::vector<StateId> out;
        if (s.label == "b") {
            out.emplace_back("b");
            for (int n = 2; n <= max_loop; ++n) out.emplace_back(renewal_label(n, n - 1));
            return out;
        }
        int n, k;
        renewal_parse(s.label, max_loop, n, k);
        out.emplace_back(k > 1 ? renewal_label(n, k - 1) : std::string("b"));
        return out;
    };
    std::vector<StateId> all{StateId("b")};
    for (int n = 2; n <= max_loop; ++n)
        for (int k = 1; k < n; ++k) all.emplace_back(renewal_label(n, k));
    std::sort(all.begin(), all.end());
    def.all_states = std::move(all);
    return ShiftGraph::generated(std::move(def));
}

ShiftGraph make_ladder() {
    ShiftGraph::GeneratorDef def;
    def.name = "ladder";
    def.params = nlohmann::json::object();
    def.base = StateId(ladder_label(0, 1));
    def.degree_bound = 4;
    def.valid = [](const StateId& s) {
        int n, c;
        return ladder_parse(s.label, n, c);
    };
    def.successors = [](const StateId& s) {
        int n, c;
        ladder_parse(s.label, n, c);
        std::vector<StateId> out{StateId(ladder_label(n + 1, 1)), StateId(ladder_label(n + 1, 2))};
        if (n >= 1) out.emplace_back(ladder_label(n - 1, 1));
        return out;
    };
    def.predecessors = [](const StateId& s) {
        int n, c;
        ladder_parse(s.label, n, c);
        std::vector<StateId> out;
        if (n >= 1) {
            out.emplace_back(ladder_label(n - 1, 1));
            out.emplace_back(ladder_label(n - 1, 2));
        }
        if (c == 1) {
            out.emplace_back(ladder_label(n + 1, 1));
            out.emplace_back(ladder_label(n + 1, 2));
        }
        return out;
    };
    return ShiftGraph::generated(std::move(def));
}

ShiftGraph make_full_shift(int k) {
    if (k < 1) throw InvalidInput("full shift needs k >= 1");
    std::vector<StateId> states;
    for (int i = 0; i < k; ++i) states.emplace_back(std::to_string(i));
    std::vector<std::pair<StateId, StateId>> edges;
    for (const auto& a : states)
        for (const auto& b : states) edges.emplace_back(a, b);
    return ShiftGraph::finite(states, edges);
}

namespace {

StateId label_of(const nlohmann::json& v) {
    if (v.is_string()) return StateId(v.get<std::string>());
    if (v.is_number_integer()) return StateId(std::to_string(v.get<long long>()));
    throw InvalidInput("state labels must be strings or integers, got " + v.dump());
}

}  // namespace

ShiftGraph build_graph(const nlohmann::json& spec) {
    if (!spec.is_object() || !spec.contains("kind")) throw InvalidInput("graph spec needs a \"kind\" key");
    const auto kind = spec.at("kind").get<std::string>();
    if (kind == "finite") {
        if (!spec.contains("states") || !spec.contains("edges"))
            throw InvalidInput("finite graph spec needs \"states\" and \"edges\"");
        std::vector<StateId> states;
        for (const auto& s : spec.at("states")) states.push_back(label_of(s));
        std::vector<std::pair<StateId, StateId>> edges;
        for (const auto& e : spec.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw InvalidInput("edge must be a pair, got " + e.dump());
            edges.emplace_back(label_of(e[0]), label_of(e[1]));
        }
        std::optional<StateId> base;
        if (spec.contains("base")) base = label_of(spec.at("base"));
        std::optional<int> bound;
        if (spec.contains("degree_bound")) bound = spec.at("degree_bound").get<int>();
        return ShiftGraph::finite(std::move(states), edges, base, bound);
    }
    if (kind == "generator") {
        const auto name = spec.value("name", std::string());
        const auto params = spec.value("params", nlohmann::json::object());
        if (name == "renewal") return make_renewal(params.value("max_loop", 64));
        if (name == "ladder") return make_ladder();
        if (name == "full") return make_full_shift(params.value("k", 2));
        throw InvalidInput("unknown generator name '" + name + "'");
    }
    throw InvalidInput("unknown graph kind '" + kind + "'");
}

// ---- exploration ----

LocalGraph explore(const ShiftGraph& g, const std::vector<StateId>& sources, int radius, Direction dir) {
    if (radius < 0) throw InvalidInput("radius must be nonnegative");
    LocalGraph lg;
    std::deque<int> queue;
    for (const auto& s : sources) {
        g.require(s);
        if (lg.index.count(s)) continue;
        lg.index.emplace(s, static_cast<int>(lg.states.size()));
        lg.states.push_back(s);
        lg.distance.push_back(0);
        queue.push_back(static_cast<int>(lg.states.size()) - 1);
    }
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop_front();
        if (lg.distance[i] == radius) continue;
        const StateId cur = lg.states[i];
        const auto& next = dir == Direction::forward ? g.successors(cur) : g.predecessors(cur);
        for (const auto& t : next) {
            if (lg.index.count(t)) continue;
            lg.index.emplace(t, static_cast<int>(lg.states.size()));
            lg.states.push_back(t);
            lg.distance.push_back(lg.distance[i] + 1);
            queue.push_back(static_cast<int>(lg.states.size()) - 1);
        }
    }
    lg.succ.assign(lg.size(), {});
    lg.pred.assign(lg.size(), {});
    for (std::size_t i = 0; i < lg.size(); ++i) {
        for (const auto& t : g.successors(lg.states[i])) {
            int j = lg.find(t);
            if (j < 0) continue;
            lg.succ[i].push_back(j);
            lg.pred[j].push_back(static_cast<int>(i));
        }
    }
    return lg;
}

LocalGraph materialize(const ShiftGraph& g, const std::vector<StateId>& states) {
    LocalGraph lg;
    for (const auto& s : states) {
        g.require(s);
        if (lg.index.count(s)) continue;
        lg.index.emplace(s, static_cast<int>(lg.states.size()));
        lg.states.push_back(s);
        lg.distance.push_back(0);
    }
    lg.succ.assign(lg.size(), {});
    lg.pred.assign(lg.size(), {});
    for (std::size_t i = 0; i < lg.size(); ++i) {
        for (const auto& t : g.successors(lg.states[i])) {
            int j = lg.find(t);
            if (j < 0) continue;
            lg.succ[i].push_back(j);
            lg.pred[j].push_back(static_cast<int>(i));
        }
    }
    return lg;
}

std::set<StateId> ball(const ShiftGraph& g, const StateId& center, int radius) {
    if (radius < 0) throw InvalidInput("radius must be nonnegative");
    g.require(center);
    std::set<StateId> out;
    for (auto dir : {Direction::forward, Direction::backward}) {
        auto lg = explore(g, {center}, radius, dir);
        out.insert(lg.states.begin(), lg.states.end());
    }
    return out;
}

namespace {

// Every state reaches every other inside the local graph.
bool strongly_connected(const LocalGraph& lg) {
    if (lg.size() == 0) return true;
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<char> seen(lg.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            int i = stack.back();
            stack.pop_back();
            for (int j : pass == 0 ? lg.succ[i] : lg.pred[i]) {
                if (!seen[j]) {
                    seen[j] = 1;
                    ++count;
                    stack.push_back(j);
                }
            }
        }
        if (count != lg.size()) return false;
    }
    return true;
}

}  // namespace

GraphReport validate_graph(const ShiftGraph& g, int radius) {
    if (radius < 0) throw InvalidInput("radius must be nonnegative");
    std::vector<StateId> region;
    if (g.has_finite_closure()) {
        region = g.all_states();
    } else {
        auto b = ball(g, g.base(), radius);
        region.assign(b.begin(), b.end());
    }
    GraphReport rep;
    rep.states_checked = region.size();
    for (const auto& s : region) {
        int out = static_cast<int>(g.successors(s).size());
        int in = static_cast<int>(g.predecessors(s).size());
        for (const auto& t : g.successors(s)) {
            const auto& back = g.predecessors(t);
            if (std::find(back.begin(), back.end(), s) == back.end())
                throw StructuralViolation("successor/predecessor mismatch at edge " + s.label + "->" + t.label);
        }
        if (out > g.degree_bound() || in > g.degree_bound())
            throw StructuralViolation("state '" + s.label + "' has degree (out " + std::to_string(out) + ", in " +
                                      std::to_string(in) + ") above bound " + std::to_string(g.degree_bound()));
        rep.max_out_degree = std::max(rep.max_out_degree, out);
        rep.max_in_degree = std::max(rep.max_in_degree, in);
    }
    rep.transitive_on_ball = strongly_connected(materialize(g, region));
    return rep;
}

bool is_admissible(const ShiftGraph& g, const std::vector<StateId>& symbols) {
    if (symbols.empty()) throw InvalidInput("admissibility needs a nonempty symbol list");
    for (const auto& s : symbols) g.require(s);
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i)
        if (!g.has_edge(symbols[i], symbols[i + 1])) return false;
    return true;
}

}  // namespace symdyn
