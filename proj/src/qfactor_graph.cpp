#include "qslam/qfactor_graph.hpp"

#include "qslam/errors.hpp"
#include "qslam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qslam {

int QualitativeFactorGraph::add_variable(const TripletId& triplet, std::optional<StateVector> unary)
{
    if (find(triplet))
        throw ArgumentError("triplet already has a variable");
    VariableNode v;
    v.id = vars_.empty() ? 0 : vars_.back().id + 1;
    v.triplet = triplet;
    if (unary) {
        if (unary->size() != d_)
            throw ArgumentError("unary belief has the wrong dimension");
        StateVector b = *unary;
        b.normalize();
        v.seen = true;
        v.belief = b;
        unary_[v.id] = std::move(b);
    } else {
        v.belief = StateVector::uniform(d_);
    }
    index_[v.id] = vars_.size();
    vars_.push_back(std::move(v));
    return vars_.back().id;
}

int QualitativeFactorGraph::add_factor(const std::array<int, 3>& variables)
{
    for (int id : variables)
        index_of(id);
    if (variables[0] == variables[1] || variables[0] == variables[2] || variables[1] == variables[2])
        throw ArgumentError("a composition factor joins three distinct variables");
    CompositionFactor f;
    f.id = int(factors_.size());
    f.variables = variables;
    factors_.push_back(f);
    return f.id;
}

void QualitativeFactorGraph::set_unary(int id, StateVector unary)
{
    VariableNode& v = variable(id);
    if (!v.seen)
        throw ArgumentError("only seen variables carry an estimate");
    if (unary.size() != d_)
        throw ArgumentError("unary belief has the wrong dimension");
    unary.normalize();
    v.belief = unary;
    unary_[id] = std::move(unary);
}

const StateVector* QualitativeFactorGraph::unary(int id) const
{
    auto it = unary_.find(id);
    return it == unary_.end() ? nullptr : &it->second;
}

std::size_t QualitativeFactorGraph::index_of(int id) const
{
    auto it = index_.find(id);
    if (it == index_.end())
        throw ArgumentError("unknown variable id " + std::to_string(id));
    return it->second;
}

std::optional<int> QualitativeFactorGraph::find(const TripletId& triplet) const
{
    for (const VariableNode& v : vars_)
        if (v.triplet == triplet)
            return v.id;
    return std::nullopt;
}

nlohmann::json QualitativeFactorGraph::to_json() const
{
    nlohmann::json doc;
    doc["states"] = d_;
    doc["variables"] = nlohmann::json::array();
    for (const VariableNode& v : vars_) {
        nlohmann::json j{{"id", v.id},
                         {"triplet", {v.triplet.a, v.triplet.b, v.triplet.c}},
                         {"seen", v.seen},
                         {"updated", v.updated},
                         {"isc", v.isc},
                         {"tsc", v.tsc},
                         {"belief", std::vector<double>(v.belief.values().begin(), v.belief.values().end())}};
        if (const StateVector* u = unary(v.id))
            j["unary"] = std::vector<double>(u->values().begin(), u->values().end());
        j["cl"] = v.cl ? nlohmann::json(*v.cl) : nlohmann::json(nullptr);
        doc["variables"].push_back(std::move(j));
    }
    doc["composition_factors"] = nlohmann::json::array();
    for (const CompositionFactor& f : factors_)
        doc["composition_factors"].push_back(f.variables);
    return doc;
}

QualitativeFactorGraph QualitativeFactorGraph::from_json(const nlohmann::json& doc)
{
    try {
        QualitativeFactorGraph g(doc.value("states", std::size_t{20}));
        for (const auto& j : doc.at("variables")) {
            const auto& t = j.at("triplet");
            TripletId id{t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()};
            std::optional<StateVector> u;
            if (j.value("seen", false)) {
                const auto& src = j.contains("unary") ? j["unary"] : j.at("belief");
                u = StateVector(src.get<std::vector<double>>());
            }
            if (g.find(id))
                throw ConfigError("duplicate triplet in graph file");
            VariableNode v;
            v.id = j.at("id").get<int>();
            if (g.index_.count(v.id))
                throw ConfigError("duplicate variable id in graph file");
            v.triplet = id;
            v.seen = u.has_value();
            if (u) {
                if (u->size() != g.d_)
                    throw ConfigError("unary belief has the wrong dimension");
                u->normalize();
                g.unary_[v.id] = *u;
            }
            if (j.contains("belief") && !j["belief"].is_null()) {
                v.belief = StateVector(j["belief"].get<std::vector<double>>());
                if (v.belief.size() != g.d_)
                    throw ConfigError("belief has the wrong dimension");
            } else {
                v.belief = u ? *u : StateVector::uniform(g.d_);
            }
            v.updated = j.value("updated", v.seen);
            v.isc = j.value("isc", 0.0);
            v.tsc = j.value("tsc", 0.0);
            if (j.contains("cl") && !j["cl"].is_null())
                v.cl = j["cl"].get<int>();
            g.index_[v.id] = g.vars_.size();
            g.vars_.push_back(std::move(v));
        }
        for (const auto& f : doc.at("composition_factors"))
            g.add_factor({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed graph definition: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("malformed graph definition: ") + e.what());
    }
}

double information_score(const StateVector& v)
{
    if (v.size() < 2)
        return 1.0;
    const double hmax = std::log(double(v.size()));
    return std::clamp((hmax - entropy(v)) / hmax, 0.0, 1.0);
}

namespace {

struct Candidate {
    bool valid = false;
    std::vector<std::size_t> receivers; // variable indices, increasing
    std::vector<StateVector> beliefs;
    std::vector<double> values;
    double score = 0.0;
};

using Evaluate = std::function<Candidate(const CompositionFactor&, const std::array<std::size_t, 3>&,
                                         const std::vector<char>&)>;
using Commit = std::function<void(const Candidate&)>;

// Shared label-correcting schedule: every open factor proposes its non-updated variables, the best
// proposal (higher score, then lowest variable id, then lowest factor) is committed, repeat.
PropagationTrace run_schedule(const QualitativeFactorGraph& graph, std::vector<char>& updated,
                              const Evaluate& evaluate, const Commit& commit, bool higher_is_better)
{
    const auto& factors = graph.factors();
    std::vector<std::array<std::size_t, 3>> slots(factors.size());
    std::vector<std::vector<std::size_t>> touching(graph.variables().size());
    for (std::size_t f = 0; f < factors.size(); ++f)
        for (int s = 0; s < 3; ++s) {
            slots[f][std::size_t(s)] = graph.index_of(factors[f].variables[std::size_t(s)]);
            touching[slots[f][std::size_t(s)]].push_back(f);
        }
    std::vector<Candidate> cache(factors.size());
    std::vector<char> stale(factors.size(), 1);

    PropagationTrace trace;
    for (;;) {
        std::size_t best = factors.size();
        for (std::size_t f = 0; f < factors.size(); ++f) {
            int up = 0;
            for (std::size_t i : slots[f])
                up += updated[i] ? 1 : 0;
            if (up == 0 || up == 3) {
                cache[f].valid = false;
                continue;
            }
            if (stale[f]) {
                cache[f] = evaluate(factors[f], slots[f], updated);
                stale[f] = 0;
            }
            const Candidate& c = cache[f];
            if (!c.valid)
                continue;
            if (best == factors.size()) {
                best = f;
                continue;
            }
            const Candidate& b = cache[best];
            bool better = higher_is_better ? c.score > b.score : c.score < b.score;
            bool tie = c.score == b.score;
            int cid = graph.variables()[c.receivers.front()].id;
            int bid = graph.variables()[b.receivers.front()].id;
            if (better || (tie && cid < bid))
                best = f;
        }
        if (best == factors.size())
            break;
        const Candidate chosen = cache[best];
        commit(chosen);
        std::vector<int> ids;
        for (std::size_t i : chosen.receivers) {
            updated[i] = 1;
            ids.push_back(graph.variables()[i].id);
            for (std::size_t f : touching[i])
                stale[f] = 1;
        }
        trace.commits.push_back(std::move(ids));
    }
    return trace;
}

std::vector<char> seen_mask(const QualitativeFactorGraph& graph)
{
    std::vector<char> m;
    for (const VariableNode& v : graph.variables())
        m.push_back(v.seen ? 1 : 0);
    return m;
}

} // namespace

PropagationTrace propagate(QualitativeFactorGraph& graph, const CompositionTensor& tensor)
{
    const std::size_t d = graph.states();
    if (tensor.dim() != d)
        throw ArgumentError("tensor dimension does not match the graph");
    auto& vars = graph.variables();
    for (VariableNode& v : vars) {
        v.updated = v.seen;
        v.belief = v.seen ? *graph.unary(v.id) : StateVector::uniform(d);
        v.isc = information_score(v.belief);
    }
    std::vector<char> updated = seen_mask(graph);
    const StateVector flat = StateVector::uniform(d);

    auto evaluate = [&](const CompositionFactor&, const std::array<std::size_t, 3>& s, const std::vector<char>& up) {
        Candidate c;
        for (int r = 0; r < 3; ++r) {
            if (up[s[std::size_t(r)]])
                continue;
            const StateVector* other[2];
            int k = 0;
            for (int q = 0; q < 3; ++q)
                if (q != r)
                    other[k++] = up[s[std::size_t(q)]] ? &vars[s[std::size_t(q)]].belief : &flat;
            MarginalResult m = marginal_onto(tensor, r, *other[0], *other[1]);
            c.receivers.push_back(s[std::size_t(r)]);
            c.values.push_back(m.informative ? information_score(m.belief) : 0.0);
            c.beliefs.push_back(std::move(m.belief));
        }
        // receivers in increasing variable id so the tie rule sees the lowest id first
        std::vector<std::size_t> order(c.receivers.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vars[c.receivers[a]].id < vars[c.receivers[b]].id; });
        Candidate sorted;
        for (std::size_t i : order) {
            sorted.receivers.push_back(c.receivers[i]);
            sorted.beliefs.push_back(c.beliefs[i]);
            sorted.values.push_back(c.values[i]);
        }
        double sum = 0.0;
        for (double v : sorted.values)
            sum += v;
        sorted.score = sum / double(sorted.values.size());
        sorted.valid = true;
        return sorted;
    };
    auto commit = [&](const Candidate& c) {
        for (std::size_t i = 0; i < c.receivers.size(); ++i) {
            VariableNode& v = vars[c.receivers[i]];
            v.belief = c.beliefs[i];
            v.isc = c.values[i];
            v.updated = true;
        }
    };
    PropagationTrace trace = run_schedule(graph, updated, evaluate, commit, true);
    for (VariableNode& v : vars)
        if (!v.updated) {
            v.belief = StateVector::uniform(d);
            v.isc = 0.0;
        }
    return trace;
}

PropagationTrace topology_score(QualitativeFactorGraph& graph, double alpha, bool selection_mode)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ArgumentError("decay factor must lie in (0, 1)");
    auto& vars = graph.variables();
    for (VariableNode& v : vars)
        v.tsc = v.seen ? (selection_mode ? 1.0 : information_score(*graph.unary(v.id))) : 0.0;
    std::vector<char> updated = seen_mask(graph);

    auto evaluate = [&](const CompositionFactor&, const std::array<std::size_t, 3>& s, const std::vector<char>& up) {
        Candidate c;
        std::vector<double> sources;
        for (std::size_t i : s)
            if (up[i])
                sources.push_back(vars[i].tsc);
            else
                c.receivers.push_back(i);
        std::sort(c.receivers.begin(), c.receivers.end(),
                  [&](std::size_t a, std::size_t b) { return vars[a].id < vars[b].id; });
        double value = sources.size() == 1 ? (1.0 - alpha) * sources[0]
                                           : (1.0 - alpha * alpha) * 0.5 * (sources[0] + sources[1]);
        c.values.assign(c.receivers.size(), value);
        c.score = value;
        c.valid = true;
        return c;
    };
    auto commit = [&](const Candidate& c) {
        for (std::size_t i = 0; i < c.receivers.size(); ++i)
            vars[c.receivers[i]].tsc = c.values[i];
    };
    return run_schedule(graph, updated, evaluate, commit, true);
}

PropagationTrace composition_level(QualitativeFactorGraph& graph)
{
    auto& vars = graph.variables();
    for (VariableNode& v : vars)
        v.cl = v.seen ? std::optional<int>(0) : std::nullopt;
    std::vector<char> updated = seen_mask(graph);

    auto evaluate = [&](const CompositionFactor&, const std::array<std::size_t, 3>& s, const std::vector<char>& up) {
        Candidate c;
        int level = -1;
        for (std::size_t i : s)
            if (up[i])
                level = level < 0 ? *vars[i].cl : std::min(level, *vars[i].cl);
            else
                c.receivers.push_back(i);
        std::sort(c.receivers.begin(), c.receivers.end(),
                  [&](std::size_t a, std::size_t b) { return vars[a].id < vars[b].id; });
        c.score = double(level + 1);
        c.values.assign(c.receivers.size(), c.score);
        c.valid = true;
        return c;
    };
    auto commit = [&](const Candidate& c) {
        for (std::size_t i = 0; i < c.receivers.size(); ++i)
            vars[c.receivers[i]].cl = int(c.values[i]);
    };
    PropagationTrace trace = run_schedule(graph, updated, evaluate, commit, false);

    int cl_max = 0;
    for (const VariableNode& v : vars)
        if (v.cl)
            cl_max = std::max(cl_max, *v.cl);
    for (VariableNode& v : vars)
        v.cl_score = !v.cl ? 0.0 : cl_max == 0 ? 1.0 : 1.0 - double(*v.cl) / double(cl_max);
    return trace;
}

double connectivity_score(const QualitativeFactorGraph& graph)
{
    const auto& vars = graph.variables();
    if (vars.empty())
        return 0.0;
    std::array<double, 10> bins{};
    for (const VariableNode& v : vars)
        bins[std::size_t(std::clamp(int(std::floor(v.tsc * 10.0)), 0, 9))] += 1.0;
    double h = 0.0;
    for (double b : bins)
        if (b > 0.0) {
            double p = b / double(vars.size());
            h -= p * std::log(p);
        }
    return h;
}

std::vector<StateVector> eliminate_exact(const QualitativeFactorGraph& graph, const CompositionTensor& tensor,
                                         std::size_t max_variables)
{
    const auto& vars = graph.variables();
    const std::size_t n = vars.size(), d = graph.states();
    if (n > max_variables)
        throw ArgumentError("exact elimination is limited to " + std::to_string(max_variables) + " variables");
    if (tensor.dim() != d)
        throw ArgumentError("tensor dimension does not match the graph");

    // factors become checkable once their last variable (in enumeration order) is assigned
    std::vector<std::vector<std::array<std::size_t, 3>>> closing(n);
    for (const CompositionFactor& f : graph.factors()) {
        std::array<std::size_t, 3> s{graph.index_of(f.variables[0]), graph.index_of(f.variables[1]),
                                     graph.index_of(f.variables[2])};
        closing[*std::max_element(s.begin(), s.end())].push_back(s);
    }
    std::vector<const StateVector*> unaries(n);
    for (std::size_t i = 0; i < n; ++i)
        unaries[i] = graph.unary(vars[i].id);

    std::vector<std::vector<double>> acc(n, std::vector<double>(d, 0.0));
    std::vector<std::size_t> state(n);
    std::function<void(std::size_t, double)> walk = [&](std::size_t i, double w) {
        if (i == n) {
            for (std::size_t k = 0; k < n; ++k)
                acc[k][state[k]] += w;
            return;
        }
        for (std::size_t s = 0; s < d; ++s) {
            double x = w;
            if (unaries[i])
                x *= (*unaries[i])[s];
            if (x == 0.0)
                continue;
            state[i] = s;
            for (const auto& f : closing[i]) {
                x *= tensor(state[f[0]], state[f[1]], state[f[2]]);
                if (x == 0.0)
                    break;
            }
            if (x != 0.0)
                walk(i + 1, x);
        }
    };
    if (n > 0)
        walk(0, 1.0);

    std::vector<StateVector> out;
    for (std::size_t k = 0; k < n; ++k) {
        StateVector v(acc[k]);
        v.normalize();
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace qslam
