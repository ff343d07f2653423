#pragma once

#include <memory>
#include <string>
#include <vector>

#include "snowflake/field.hpp"

namespace snowflake::expr {

/// AST for the field mini-language:
///   literals, coordinates x1..x9, + - * / ^, sin cos abs sqrt min max,
///   builtins lacunary(alpha, m [, axis]), koch_x(level), koch_y(level).
/// This is the only user-function channel (no dynamic code loading).
struct Node;
using NodePtr = std::shared_ptr<const Node>;

enum class NodeKind { Number, Variable, Unary, Binary, Call };

struct Node {
    NodeKind kind = NodeKind::Number;
    double number = 0.0;
    int var_axis = 0;          // Variable: 0-based
    char op = 0;               // Unary: '-'; Binary: one of + - * / ^
    std::string call;          // Call: function name
    std::vector<NodePtr> args; // Unary/Binary operands or call arguments
};

/// Parses the text or throws ParseError with the byte offset and, for
/// syntax errors, the expected-token set.
NodePtr parse_field_expr(const std::string& text);

/// Highest coordinate index used (1-based); 0 when constant.
int max_variable(const NodePtr& node);

std::string to_string(const NodePtr& node);

struct CompileOptions {
    int dim = 1;
    // declared Hölder data; when absent, constants are estimated on `domain`
    // from samples and the field is labeled heuristic
    std::optional<double> alpha;
    std::optional<double> holder_bound;
    std::optional<double> sup_bound;
    std::optional<Box> domain;
    int estimate_samples = 4000;
};

/// Compiles the AST to an evaluator and attaches exponent/constant metadata.
/// A bare lacunary(...) call gets certified constants; everything else is
/// certified only when the caller declares the constants.
ScalarField compile(const NodePtr& node, const CompileOptions& opts);

ScalarField compile(const std::string& text, const CompileOptions& opts);

}  // namespace snowflake::expr
