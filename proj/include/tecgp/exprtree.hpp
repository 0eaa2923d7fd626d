#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tecgp/rng.hpp"

namespace tecgp {

/// Input variables of a prediction model, in column order.
enum class Feature : std::uint8_t { SinHour = 0, CosHour = 1, SinDay = 2, CosDay = 3, Ssn = 4 };

inline constexpr std::size_t kFeatureCount = 5;

/// One row of model inputs, indexed by Feature.
using FeatureRow = std::array<double, kFeatureCount>;

/// Column views over a dataset, one span per Feature, all of equal length.
using FeatureColumns = std::array<std::span<const double>, kFeatureCount>;

enum class NodeKind : std::uint8_t { Add, Sub, Mul, Div, Var, Const };

inline constexpr std::array<NodeKind, 4> kFunctionKinds = {NodeKind::Add, NodeKind::Sub,
                                                           NodeKind::Mul, NodeKind::Div};

constexpr bool is_function(NodeKind kind) { return kind <= NodeKind::Div; }

/// Every function symbol is binary; terminals take no arguments.
constexpr int arity(NodeKind kind) { return is_function(kind) ? 2 : 0; }

struct Node {
    NodeKind kind = NodeKind::Var;
    std::uint8_t var = 0;  // Feature index when kind == Var
    double value = 0.0;    // constant value when kind == Const

    static Node function(NodeKind kind);
    static Node variable(Feature feature) { return {NodeKind::Var, static_cast<std::uint8_t>(feature), 0.0}; }
    static Node constant(double value);

    bool is_function() const { return tecgp::is_function(kind); }

    friend bool operator==(const Node&, const Node&) = default;
};

/// Terminal and function sets available to the generators and mutation
/// operators. The function set is always {+, -, *, /}; the terminal set is the
/// five features plus, optionally, ephemeral random constants drawn uniformly
/// from [constant_min, constant_max] when the node is created.
struct PrimitiveSet {
    bool use_constants = false;
    double constant_min = -5.0;
    double constant_max = 5.0;

    std::size_t function_count() const { return kFunctionKinds.size(); }
    /// Terminal slots: one per feature plus one for the constant generator.
    std::size_t terminal_slots() const { return kFeatureCount + (use_constants ? 1 : 0); }

    Node random_function(Rng& rng) const;
    Node random_terminal(Rng& rng) const;

    void validate() const;
};

/// Expression tree stored as its prefix (pre-order) node sequence.
///
/// Trees are immutable values: every edit returns a new tree. A subtree
/// rooted at node i occupies the contiguous range [i, subtree_end(i)).
class ExprTree {
public:
    /// Builds from a prefix sequence; throws std::invalid_argument unless the
    /// sequence encodes exactly one complete tree.
    explicit ExprTree(std::vector<Node> prefix);

    static ExprTree variable(Feature feature) { return ExprTree({Node::variable(feature)}); }
    static ExprTree constant(double value) { return ExprTree({Node::constant(value)}); }
    static ExprTree apply(NodeKind op, const ExprTree& left, const ExprTree& right);

    std::span<const Node> nodes() const { return nodes_; }
    const Node& node(std::size_t i) const { return nodes_.at(i); }

    /// Total node count.
    std::size_t size() const { return nodes_.size(); }
    /// Edges on the longest root-to-leaf path; a single terminal has depth 0.
    std::size_t depth() const;

    /// One past the last node of the subtree rooted at i.
    std::size_t subtree_end(std::size_t i) const;
    /// Depth (edges from the root) of every node, in prefix order.
    std::vector<std::size_t> node_depths() const;

    /// Returns a copy with the subtree rooted at i replaced by `replacement`.
    ExprTree replace_subtree(std::size_t i, const ExprTree& replacement) const;
    /// Returns a copy with the single node i replaced by a node of equal arity.
    ExprTree replace_node(std::size_t i, const Node& replacement) const;

    /// Evaluates the model on one input row.
    double evaluate(const FeatureRow& row) const;

    /// Evaluates the model on every row of `columns`, writing into `out`.
    /// Produces bit-identical values to the single-row evaluate().
    void evaluate(const FeatureColumns& columns, std::span<double> out) const;

    friend bool operator==(const ExprTree&, const ExprTree&) = default;

private:
    std::vector<Node> nodes_;
};

/// Protected division: a / b, or 1 when b is zero.
inline double protected_div(double a, double b) { return b == 0.0 ? 1.0 : a / b; }

/// Every leaf at exactly `depth`.
ExprTree generate_full(Rng& rng, std::size_t depth, const PrimitiveSet& primitives);

/// Depth at most `max_depth`; below the bound each node is a function with
/// probability |F| / (|F| + terminal slots).
ExprTree generate_grow(Rng& rng, std::size_t max_depth, const PrimitiveSet& primitives);

/// Ramped half-and-half initialization over depths 2..max_depth.
///
/// Each ramp depth gets count / buckets trees; the remainder goes one tree
/// per bucket starting from the deepest. Within a bucket the full method
/// builds the larger half.
std::vector<ExprTree> ramped_half_and_half(Rng& rng, std::size_t count, std::size_t max_depth,
                                           const PrimitiveSet& primitives);

/// Tree sizes assigned to each ramp depth by ramped_half_and_half, as
/// (depth, full count, grow count) triples from shallow to deep.
struct RampBucket {
    std::size_t depth;
    std::size_t full;
    std::size_t grow;
};
std::vector<RampBucket> ramp_buckets(std::size_t count, std::size_t max_depth);

// ---------------------------------------------------------------------------
// Prefix text format
//
//   expr     := terminal | "(" op expr expr ")"
//   op       := "+" | "-" | "*" | "/"
//   terminal := variable | number
//   variable := "sinhour" | "coshour" | "sinday" | "cosday" | "ssn"
//
// Tokens are separated by whitespace or parentheses. Numbers use the shortest
// decimal form that reads back to the identical double.
// ---------------------------------------------------------------------------

using VariableNames = std::array<std::string_view, kFeatureCount>;

inline constexpr VariableNames kDefaultVariableNames = {"sinhour", "coshour", "sinday", "cosday",
                                                        "ssn"};

std::string_view feature_name(Feature feature);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t position);
    /// Character offset of the offending token in the input text.
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

std::string to_prefix(const ExprTree& tree, const VariableNames& names = kDefaultVariableNames);

ExprTree parse_prefix(std::string_view text, const VariableNames& names = kDefaultVariableNames);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

}  // namespace tecgp
