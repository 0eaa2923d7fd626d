#include "tecgp/exprtree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>
#include <system_error>

#include "tecgp/errors.hpp"

namespace tecgp {

Node Node::function(NodeKind kind) {
    if (!tecgp::is_function(kind)) {
        throw std::invalid_argument("Node::function: not a function kind");
    }
    return {kind, 0, 0.0};
}

Node Node::constant(double value) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument("Node::constant: constant must be finite");
    }
    return {NodeKind::Const, 0, value};
}

void PrimitiveSet::validate() const {
    if (use_constants &&
        !(std::isfinite(constant_min) && std::isfinite(constant_max) && constant_min <= constant_max)) {
        throw ConfigError("constant range must be finite with min <= max");
    }
}

Node PrimitiveSet::random_function(Rng& rng) const {
    return Node::function(kFunctionKinds[rng.uniform_index(kFunctionKinds.size())]);
}

Node PrimitiveSet::random_terminal(Rng& rng) const {
    const auto slot = rng.uniform_index(terminal_slots());
    if (slot < kFeatureCount) {
        return Node::variable(static_cast<Feature>(slot));
    }
    return Node::constant(rng.uniform(constant_min, constant_max));
}

// ---------------------------------------------------------------------------
// ExprTree

ExprTree::ExprTree(std::vector<Node> prefix) : nodes_(std::move(prefix)) {
    // need = number of subtrees still to be read
    std::size_t need = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (need == 0) {
            throw std::invalid_argument("ExprTree: trailing nodes after a complete tree");
        }
        const Node& n = nodes_[i];
        if (n.kind > NodeKind::Const) {
            throw std::invalid_argument("ExprTree: unknown node kind");
        }
        if (n.kind == NodeKind::Var && n.var >= kFeatureCount) {
            throw std::invalid_argument("ExprTree: variable index out of range");
        }
        if (n.kind == NodeKind::Const && !std::isfinite(n.value)) {
            throw std::invalid_argument("ExprTree: non-finite constant");
        }
        need = need - 1 + static_cast<std::size_t>(arity(n.kind));
    }
    if (need != 0) {
        throw std::invalid_argument("ExprTree: incomplete prefix sequence");
    }
}

ExprTree ExprTree::apply(NodeKind op, const ExprTree& left, const ExprTree& right) {
    std::vector<Node> prefix;
    prefix.reserve(1 + left.size() + right.size());
    prefix.push_back(Node::function(op));
    prefix.insert(prefix.end(), left.nodes_.begin(), left.nodes_.end());
    prefix.insert(prefix.end(), right.nodes_.begin(), right.nodes_.end());
    return ExprTree(std::move(prefix));
}

std::size_t ExprTree::depth() const {
    const auto depths = node_depths();
    return *std::max_element(depths.begin(), depths.end());
}

std::size_t ExprTree::subtree_end(std::size_t i) const {
    if (i >= nodes_.size()) {
        throw std::out_of_range("ExprTree::subtree_end: node index out of range");
    }
    std::size_t need = 1;
    std::size_t j = i;
    while (need > 0) {
        need = need - 1 + static_cast<std::size_t>(arity(nodes_[j].kind));
        ++j;
    }
    return j;
}

std::vector<std::size_t> ExprTree::node_depths() const {
    std::vector<std::size_t> depths(nodes_.size());
    // Stack of depths for children still to be visited.
    std::vector<std::size_t> pending{0};
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const std::size_t d = pending.back();
        pending.pop_back();
        depths[i] = d;
        for (int c = 0; c < arity(nodes_[i].kind); ++c) {
            pending.push_back(d + 1);
        }
    }
    return depths;
}

ExprTree ExprTree::replace_subtree(std::size_t i, const ExprTree& replacement) const {
    const std::size_t end = subtree_end(i);
    std::vector<Node> prefix;
    prefix.reserve(nodes_.size() - (end - i) + replacement.size());
    prefix.insert(prefix.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
    prefix.insert(prefix.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    prefix.insert(prefix.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
    return ExprTree(std::move(prefix));
}

ExprTree ExprTree::replace_node(std::size_t i, const Node& replacement) const {
    if (arity(nodes_.at(i).kind) != arity(replacement.kind)) {
        throw std::invalid_argument("ExprTree::replace_node: arity mismatch");
    }
    std::vector<Node> prefix = nodes_;
    prefix[i] = replacement;
    return ExprTree(std::move(prefix));
}

namespace {

double apply_op(NodeKind op, double a, double b) {
    switch (op) {
        case NodeKind::Add: return a + b;
        case NodeKind::Sub: return a - b;
        case NodeKind::Mul: return a * b;
        case NodeKind::Div: return protected_div(a, b);
        default: break;
    }
    throw std::logic_error("apply_op: not a function node");
}

double evaluate_at(std::span<const Node> nodes, std::size_t& pos, const FeatureRow& row) {
    const Node& n = nodes[pos++];
    switch (n.kind) {
        case NodeKind::Var: return row[n.var];
        case NodeKind::Const: return n.value;
        default: {
            const double a = evaluate_at(nodes, pos, row);
            const double b = evaluate_at(nodes, pos, row);
            return apply_op(n.kind, a, b);
        }
    }
}

constexpr std::size_t kChunk = 256;

}  // namespace

double ExprTree::evaluate(const FeatureRow& row) const {
    std::size_t pos = 0;
    return evaluate_at(nodes_, pos, row);
}

void ExprTree::evaluate(const FeatureColumns& columns, std::span<double> out) const {
    const std::size_t rows = out.size();
    for (const auto& col : columns) {
        if (col.size() != rows) {
            throw std::invalid_argument("ExprTree::evaluate: column length mismatch");
        }
    }

    // Stack machine over the reversed prefix sequence, one chunk of rows at a
    // time. Entries point either into an input column or into a scratch buffer.
    struct Slot {
        const double* data;
        int buffer;  // scratch index, or -1 for an input column
    };
    std::deque<std::array<double, kChunk>> scratch;  // deque: stable addresses
    std::vector<int> free_buffers;
    std::vector<Slot> stack;
    stack.reserve(nodes_.size());

    auto acquire = [&]() -> int {
        if (!free_buffers.empty()) {
            const int b = free_buffers.back();
            free_buffers.pop_back();
            return b;
        }
        scratch.emplace_back();
        return static_cast<int>(scratch.size()) - 1;
    };

    for (std::size_t begin = 0; begin < rows; begin += kChunk) {
        const std::size_t len = std::min(kChunk, rows - begin);
        for (std::size_t k = nodes_.size(); k-- > 0;) {
            const Node& n = nodes_[k];
            if (n.kind == NodeKind::Var) {
                stack.push_back({columns[n.var].data() + begin, -1});
                continue;
            }
            if (n.kind == NodeKind::Const) {
                const int b = acquire();
                std::fill_n(scratch[static_cast<std::size_t>(b)].begin(), len, n.value);
                stack.push_back({scratch[static_cast<std::size_t>(b)].data(), b});
                continue;
            }
            const Slot left = stack.back();
            stack.pop_back();
            const Slot right = stack.back();
            stack.pop_back();
            int target = left.buffer >= 0 ? left.buffer : right.buffer;
            if (target < 0) {
                target = acquire();
            }
            double* dst = scratch[static_cast<std::size_t>(target)].data();
            const double* a = left.data;
            const double* b = right.data;
            switch (n.kind) {
                case NodeKind::Add:
                    for (std::size_t r = 0; r < len; ++r) dst[r] = a[r] + b[r];
                    break;
                case NodeKind::Sub:
                    for (std::size_t r = 0; r < len; ++r) dst[r] = a[r] - b[r];
                    break;
                case NodeKind::Mul:
                    for (std::size_t r = 0; r < len; ++r) dst[r] = a[r] * b[r];
                    break;
                default:
                    for (std::size_t r = 0; r < len; ++r) dst[r] = b[r] == 0.0 ? 1.0 : a[r] / b[r];
                    break;
            }
            if (left.buffer >= 0 && left.buffer != target) free_buffers.push_back(left.buffer);
            if (right.buffer >= 0 && right.buffer != target) free_buffers.push_back(right.buffer);
            stack.push_back({dst, target});
        }
        const Slot result = stack.back();
        stack.pop_back();
        std::copy_n(result.data, len, out.begin() + static_cast<std::ptrdiff_t>(begin));
        if (result.buffer >= 0) free_buffers.push_back(result.buffer);
    }
}

// ---------------------------------------------------------------------------
// Generators

namespace {

void emit_full(Rng& rng, std::size_t remaining, const PrimitiveSet& ps, std::vector<Node>& out) {
    if (remaining == 0) {
        out.push_back(ps.random_terminal(rng));
        return;
    }
    out.push_back(ps.random_function(rng));
    emit_full(rng, remaining - 1, ps, out);
    emit_full(rng, remaining - 1, ps, out);
}

void emit_grow(Rng& rng, std::size_t remaining, const PrimitiveSet& ps, std::vector<Node>& out) {
    if (remaining == 0) {
        out.push_back(ps.random_terminal(rng));
        return;
    }
    // One draw over all primitive slots: functions first, then terminals.
    const std::size_t functions = ps.function_count();
    const auto slot = rng.uniform_index(functions + ps.terminal_slots());
    if (slot >= functions) {
        const auto terminal = slot - functions;
        if (terminal < kFeatureCount) {
            out.push_back(Node::variable(static_cast<Feature>(terminal)));
        } else {
            out.push_back(Node::constant(rng.uniform(ps.constant_min, ps.constant_max)));
        }
        return;
    }
    out.push_back(Node::function(kFunctionKinds[slot]));
    emit_grow(rng, remaining - 1, ps, out);
    emit_grow(rng, remaining - 1, ps, out);
}

}  // namespace

ExprTree generate_full(Rng& rng, std::size_t depth, const PrimitiveSet& primitives) {
    std::vector<Node> prefix;
    emit_full(rng, depth, primitives, prefix);
    return ExprTree(std::move(prefix));
}

ExprTree generate_grow(Rng& rng, std::size_t max_depth, const PrimitiveSet& primitives) {
    std::vector<Node> prefix;
    emit_grow(rng, max_depth, primitives, prefix);
    return ExprTree(std::move(prefix));
}

std::vector<RampBucket> ramp_buckets(std::size_t count, std::size_t max_depth) {
    if (count < 1 || max_depth < 1) {
        throw std::invalid_argument("ramped_half_and_half: count and max_depth must be >= 1");
    }
    const std::size_t lowest = std::min<std::size_t>(2, max_depth);
    const std::size_t n_buckets = max_depth - lowest + 1;
    const std::size_t base = count / n_buckets;
    const std::size_t remainder = count % n_buckets;

    std::vector<RampBucket> buckets;
    for (std::size_t b = 0; b < n_buckets; ++b) {
        // remainder handed out from the deepest bucket downwards
        const bool extra = (n_buckets - 1 - b) < remainder;
        const std::size_t share = base + (extra ? 1 : 0);
        buckets.push_back({lowest + b, (share + 1) / 2, share / 2});
    }
    return buckets;
}

std::vector<ExprTree> ramped_half_and_half(Rng& rng, std::size_t count, std::size_t max_depth,
                                           const PrimitiveSet& primitives) {
    std::vector<ExprTree> trees;
    trees.reserve(count);
    for (const RampBucket& bucket : ramp_buckets(count, max_depth)) {
        for (std::size_t k = 0; k < bucket.full; ++k) {
            trees.push_back(generate_full(rng, bucket.depth, primitives));
        }
        for (std::size_t k = 0; k < bucket.grow; ++k) {
            trees.push_back(generate_grow(rng, bucket.depth, primitives));
        }
    }
    return trees;
}

// ---------------------------------------------------------------------------
// Prefix text

std::string_view feature_name(Feature feature) {
    return kDefaultVariableNames[static_cast<std::size_t>(feature)];
}

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " at position " + std::to_string(position)), position_(position) {}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf.data(), end);
}

namespace {

char op_symbol(NodeKind kind) {
    switch (kind) {
        case NodeKind::Add: return '+';
        case NodeKind::Sub: return '-';
        case NodeKind::Mul: return '*';
        case NodeKind::Div: return '/';
        default: return '?';
    }
}

void render(std::span<const Node> nodes, std::size_t& pos, const VariableNames& names, std::string& out) {
    const Node& n = nodes[pos++];
    switch (n.kind) {
        case NodeKind::Var:
            out += names[n.var];
            return;
        case NodeKind::Const:
            out += format_double(n.value);
            return;
        default:
            out += '(';
            out += op_symbol(n.kind);
            out += ' ';
            render(nodes, pos, names, out);
            out += ' ';
            render(nodes, pos, names, out);
            out += ')';
    }
}

struct Token {
    std::string_view text;
    std::size_t position;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(' || c == ')') {
            tokens.push_back({text.substr(i, 1), i});
            ++i;
        } else {
            const std::size_t start = i;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
                   text[i] != ')') {
                ++i;
            }
            tokens.push_back({text.substr(start, i - start), start});
        }
    }
    return tokens;
}

class Parser {
public:
    Parser(std::string_view text, const VariableNames& names)
        : tokens_(tokenize(text)), names_(names), end_position_(text.size()) {}

    ExprTree parse() {
        if (tokens_.empty()) {
            throw ParseError("empty expression", 0);
        }
        std::vector<Node> prefix;
        parse_expr(prefix);
        if (pos_ != tokens_.size()) {
            throw ParseError("trailing token '" + std::string(tokens_[pos_].text) + "'", tokens_[pos_].position);
        }
        return ExprTree(std::move(prefix));
    }

private:
    const Token& expect_token(const char* what) {
        if (pos_ >= tokens_.size()) {
            throw ParseError(std::string("unexpected end of input, expected ") + what, end_position_);
        }
        return tokens_[pos_++];
    }

    void parse_expr(std::vector<Node>& out) {
        const Token& tok = expect_token("an expression");
        if (tok.text == ")") {
            throw ParseError("unexpected ')', expected an expression", tok.position);
        }
        if (tok.text == "(") {
            const Token& op = expect_token("an operator");
            NodeKind kind;
            if (op.text == "+") kind = NodeKind::Add;
            else if (op.text == "-") kind = NodeKind::Sub;
            else if (op.text == "*") kind = NodeKind::Mul;
            else if (op.text == "/") kind = NodeKind::Div;
            else throw ParseError("unknown operator '" + std::string(op.text) + "'", op.position);
            out.push_back(Node::function(kind));
            for (int arg = 0; arg < 2; ++arg) {
                if (pos_ < tokens_.size() && tokens_[pos_].text == ")") {
                    throw ParseError("operator '" + std::string(op.text) + "' expects 2 arguments, got " +
                                         std::to_string(arg),
                                     tokens_[pos_].position);
                }
                parse_expr(out);
            }
            const Token& close = expect_token("')'");
            if (close.text != ")") {
                throw ParseError("operator '" + std::string(op.text) + "' expects 2 arguments, found extra '" +
                                     std::string(close.text) + "'",
                                 close.position);
            }
            return;
        }
        for (std::size_t v = 0; v < kFeatureCount; ++v) {
            if (tok.text == names_[v]) {
                out.push_back(Node::variable(static_cast<Feature>(v)));
                return;
            }
        }
        double value = 0.0;
        const char* first = tok.text.data();
        const char* last = first + tok.text.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec == std::errc{} && ptr == last && std::isfinite(value)) {
            out.push_back(Node::constant(value));
            return;
        }
        throw ParseError("unknown symbol '" + std::string(tok.text) + "'", tok.position);
    }

    std::vector<Token> tokens_;
    const VariableNames& names_;
    std::size_t end_position_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string to_prefix(const ExprTree& tree, const VariableNames& names) {
    std::string out;
    std::size_t pos = 0;
    render(tree.nodes(), pos, names, out);
    return out;
}

ExprTree parse_prefix(std::string_view text, const VariableNames& names) {
    return Parser(text, names).parse();
}

}  // namespace tecgp
