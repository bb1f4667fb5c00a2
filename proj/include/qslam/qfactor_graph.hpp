#pragma once

#include "qslam/composition.hpp"
#include "qslam/models.hpp"
#include "qslam/state_vector.hpp"

#include <array>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

namespace qslam {

struct VariableNode {
    int id = 0;
    TripletId triplet;
    StateVector belief;
    bool seen = false;
    bool updated = false;
    double isc = 0.0;
    double tsc = 0.0;
    std::optional<int> cl;
    double cl_score = 0.0; // 1 - cl / max cl; 0 when unreachable
};

/// Trinary factor over variables in (AB:C, BC:D, AB:D) slot order.
struct CompositionFactor {
    int id = 0;
    std::array<int, 3> variables{};
};

/// Variables are triplet states, unary factors their own estimates, and composition
/// factors tie triplets sharing landmarks. Camera poses are not part of the graph.
class QualitativeFactorGraph {
public:
    explicit QualitativeFactorGraph(std::size_t states = 20) : d_(states) {}

    std::size_t states() const { return d_; }

    /// A seen variable takes `unary` as its estimate; unseen variables start uniform.
    int add_variable(const TripletId& triplet, std::optional<StateVector> unary = std::nullopt);
    int add_factor(const std::array<int, 3>& variables);
    /// Replaces the estimate of a seen variable.
    void set_unary(int id, StateVector unary);

    const std::vector<VariableNode>& variables() const { return vars_; }
    std::vector<VariableNode>& variables() { return vars_; }
    const std::vector<CompositionFactor>& factors() const { return factors_; }
    const VariableNode& variable(int id) const { return vars_.at(index_of(id)); }
    VariableNode& variable(int id) { return vars_.at(index_of(id)); }
    const StateVector* unary(int id) const;
    std::size_t index_of(int id) const;
    std::optional<int> find(const TripletId& triplet) const;

    nlohmann::json to_json() const;
    static QualitativeFactorGraph from_json(const nlohmann::json& doc);

private:
    std::size_t d_;
    std::vector<VariableNode> vars_;
    std::vector<CompositionFactor> factors_;
    std::map<int, StateVector> unary_;
    std::map<int, std::size_t> index_;
};

/// 0 for a uniform vector, 1 for a certain one.
double information_score(const StateVector& v);

struct PropagationTrace {
    std::vector<std::vector<int>> commits; // variable ids committed at each iteration
};

/// Composition-based propagation from seen to unseen variables. Each iteration keeps only the
/// best-scoring candidate; unreachable variables end uniform.
PropagationTrace propagate(QualitativeFactorGraph& graph, const CompositionTensor& tensor);

/// Same schedule driven by the information decay model. With `selection_mode` seen nodes start at 1
/// instead of their information score.
PropagationTrace topology_score(QualitativeFactorGraph& graph, double alpha = 0.5, bool selection_mode = false);

/// Hop-count alternative to the decay model; also fills the normalised score.
PropagationTrace composition_level(QualitativeFactorGraph& graph);

/// Entropy of the 10-bin histogram of all topology scores.
double connectivity_score(const QualitativeFactorGraph& graph);

/// Exact marginals by enumerating the joint; refuses graphs with more than `max_variables` variables.
std::vector<StateVector> eliminate_exact(const QualitativeFactorGraph& graph, const CompositionTensor& tensor,
                                         std::size_t max_variables = 8);

} // namespace qslam
