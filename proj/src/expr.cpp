#include "snowflake/expr.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "snowflake/errors.hpp"
#include "snowflake/koch.hpp"

namespace snowflake::expr {

namespace {

struct Token {
    enum Kind { Number, Ident, Op, LParen, RParen, Comma, End } kind = End;
    double number = 0.0;
    std::string text;
    char op = 0;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        Token t;
        t.offset = pos_;
        if (pos_ >= s_.size()) {
            t.kind = Token::End;
            return t;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            try {
                t.number = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                throw ParseError("malformed number", pos_, "number");
            }
            t.kind = Token::Number;
            pos_ += used;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t e = pos_;
            while (e < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[e])) || s_[e] == '_'))
                ++e;
            t.kind = Token::Ident;
            t.text = s_.substr(pos_, e - pos_);
            pos_ = e;
            return t;
        }
        switch (c) {
            case '+': case '-': case '*': case '/': case '^':
                t.kind = Token::Op;
                t.op = c;
                ++pos_;
                return t;
            case '(': t.kind = Token::LParen; ++pos_; return t;
            case ')': t.kind = Token::RParen; ++pos_; return t;
            case ',': t.kind = Token::Comma; ++pos_; return t;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", pos_,
                                 "number, identifier, operator or '('");
        }
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
};

const std::map<std::string, int>& function_arity() {
    static const std::map<std::string, int> table = {
        {"sin", 1}, {"cos", 1}, {"abs", 1},  {"sqrt", 1},    {"min", 2},
        {"max", 2}, {"lacunary", -1 /* 2 or 3 */}, {"koch_x", 1}, {"koch_y", 1},
    };
    return table;
}

NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->op = op;
    n->args = {std::move(lhs), std::move(rhs)};
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : lex_(s) { advance(); }

    NodePtr parse() {
        NodePtr e = expression();
        if (cur_.kind != Token::End)
            throw ParseError("trailing input", cur_.offset, "end of expression or operator");
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }

    // precedence climbing: + - (1) < * / (2) < unary - (3) < ^ (4, right)
    NodePtr expression(int min_prec = 1) {
        NodePtr lhs = unary();
        for (;;) {
            if (cur_.kind != Token::Op) break;
            const char op = cur_.op;
            int prec = (op == '+' || op == '-') ? 1 : (op == '*' || op == '/') ? 2 : -1;
            if (prec < min_prec || prec < 0) break;
            advance();
            NodePtr rhs = expression(prec + 1);
            lhs = make_binary(op, lhs, rhs);
        }
        return lhs;
    }

    NodePtr unary() {
        if (cur_.kind == Token::Op && (cur_.op == '-' || cur_.op == '+')) {
            const char op = cur_.op;
            advance();
            NodePtr operand = unary();
            if (op == '+') return operand;
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Unary;
            n->op = '-';
            n->args = {operand};
            return n;
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (cur_.kind == Token::Op && cur_.op == '^') {
            advance();
            NodePtr exp = unary();  // right-associative, allows x^-0.5
            return make_binary('^', base, exp);
        }
        return base;
    }

    NodePtr atom() {
        if (cur_.kind == Token::Number) {
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Number;
            n->number = cur_.number;
            advance();
            return n;
        }
        if (cur_.kind == Token::LParen) {
            advance();
            NodePtr inner = expression();
            expect(Token::RParen, ")");
            return inner;
        }
        if (cur_.kind == Token::Ident) {
            const std::string name = cur_.text;
            const std::size_t off = cur_.offset;
            advance();
            if (name.size() >= 2 && name[0] == 'x' &&
                std::isdigit(static_cast<unsigned char>(name[1]))) {
                int axis = 0;
                for (std::size_t i = 1; i < name.size(); ++i) {
                    if (!std::isdigit(static_cast<unsigned char>(name[i])))
                        throw ParseError("unknown identifier '" + name + "'", off);
                    axis = axis * 10 + (name[i] - '0');
                }
                if (axis < 1 || axis > 9)
                    throw ParseError("coordinate index out of range in '" + name + "'", off);
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::Variable;
                n->var_axis = axis - 1;
                return n;
            }
            auto it = function_arity().find(name);
            if (it == function_arity().end())
                throw ParseError("unknown identifier '" + name + "'", off);
            expect(Token::LParen, "(");
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Call;
            n->call = name;
            if (cur_.kind != Token::RParen) {
                n->args.push_back(expression());
                while (cur_.kind == Token::Comma) {
                    advance();
                    n->args.push_back(expression());
                }
            }
            expect(Token::RParen, ")");
            const int arity = it->second;
            const int got = static_cast<int>(n->args.size());
            if (arity >= 0 ? got != arity : (got != 2 && got != 3))
                throw ParseError("wrong argument count for '" + name + "'", off,
                                 arity >= 0 ? std::to_string(arity) + " argument(s)"
                                            : "2 or 3 arguments");
            return n;
        }
        throw ParseError("expected a value", cur_.offset,
                         "number, coordinate, function call or '('");
    }

    void expect(Token::Kind kind, const char* what) {
        if (cur_.kind != kind)
            throw ParseError(std::string("expected '") + what + "'", cur_.offset, what);
        advance();
    }

    Lexer lex_;
    Token cur_;
};

double constant_arg(const NodePtr& n, const char* fn) {
    if (n->kind != NodeKind::Number)
        throw ParseError(std::string(fn) + " needs literal arguments", 0);
    return n->number;
}

const currents::KochPath& koch_cache(int level) {
    static std::mutex mu;
    static std::map<int, currents::KochPath> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(level);
    if (it == cache.end()) it = cache.emplace(level, currents::koch_parametrization(level)).first;
    return it->second;
}

FieldEval build_eval(const NodePtr& n) {
    switch (n->kind) {
        case NodeKind::Number: {
            const double v = n->number;
            return [v](std::span<const double>) { return v; };
        }
        case NodeKind::Variable: {
            const int a = n->var_axis;
            return [a](std::span<const double> x) { return x[a]; };
        }
        case NodeKind::Unary: {
            auto inner = build_eval(n->args[0]);
            return [inner](std::span<const double> x) { return -inner(x); };
        }
        case NodeKind::Binary: {
            auto lhs = build_eval(n->args[0]);
            auto rhs = build_eval(n->args[1]);
            switch (n->op) {
                case '+': return [lhs, rhs](std::span<const double> x) { return lhs(x) + rhs(x); };
                case '-': return [lhs, rhs](std::span<const double> x) { return lhs(x) - rhs(x); };
                case '*': return [lhs, rhs](std::span<const double> x) { return lhs(x) * rhs(x); };
                case '/': return [lhs, rhs](std::span<const double> x) { return lhs(x) / rhs(x); };
                case '^':
                    return [lhs, rhs](std::span<const double> x) {
                        return std::pow(lhs(x), rhs(x));
                    };
            }
            break;
        }
        case NodeKind::Call: {
            if (n->call == "sin" || n->call == "cos" || n->call == "abs" || n->call == "sqrt") {
                auto inner = build_eval(n->args[0]);
                if (n->call == "sin")
                    return [inner](std::span<const double> x) { return std::sin(inner(x)); };
                if (n->call == "cos")
                    return [inner](std::span<const double> x) { return std::cos(inner(x)); };
                if (n->call == "abs")
                    return [inner](std::span<const double> x) { return std::abs(inner(x)); };
                return [inner](std::span<const double> x) { return std::sqrt(inner(x)); };
            }
            if (n->call == "min" || n->call == "max") {
                auto lhs = build_eval(n->args[0]);
                auto rhs = build_eval(n->args[1]);
                if (n->call == "min")
                    return [lhs, rhs](std::span<const double> x) {
                        return std::min(lhs(x), rhs(x));
                    };
                return [lhs, rhs](std::span<const double> x) { return std::max(lhs(x), rhs(x)); };
            }
            if (n->call == "lacunary") {
                const double alpha = constant_arg(n->args[0], "lacunary");
                const int m = static_cast<int>(constant_arg(n->args[1], "lacunary"));
                int axis = 0;
                if (n->args.size() == 3) {
                    if (n->args[2]->kind != NodeKind::Variable)
                        throw ParseError("lacunary axis must be a coordinate", 0);
                    axis = n->args[2]->var_axis;
                }
                auto field = lacunary_series(alpha, m, LacunaryKind::cosine_1d, axis, axis + 1);
                return field.eval;
            }
            if (n->call == "koch_x" || n->call == "koch_y") {
                const int level = static_cast<int>(constant_arg(n->args[0], n->call.c_str()));
                const int comp = n->call == "koch_x" ? 0 : 1;
                const auto& path = koch_cache(level);
                return [&path, comp](std::span<const double> x) {
                    double p[2];
                    path.eval(x[0], p);
                    return p[comp];
                };
            }
            break;
        }
    }
    throw std::logic_error("build_eval: unreachable");
}

}  // namespace

NodePtr parse_field_expr(const std::string& text) { return Parser(text).parse(); }

int max_variable(const NodePtr& node) {
    switch (node->kind) {
        case NodeKind::Variable: return node->var_axis + 1;
        case NodeKind::Number: return 0;
        default: {
            int m = 0;
            for (const auto& a : node->args) m = std::max(m, max_variable(a));
            if (node->kind == NodeKind::Call && (node->call == "koch_x" || node->call == "koch_y"))
                m = std::max(m, 1);
            if (node->kind == NodeKind::Call && node->call == "lacunary" && node->args.size() == 2)
                m = std::max(m, 1);
            return m;
        }
    }
}

std::string to_string(const NodePtr& n) {
    std::ostringstream os;
    switch (n->kind) {
        case NodeKind::Number: os << n->number; break;
        case NodeKind::Variable: os << "x" << (n->var_axis + 1); break;
        case NodeKind::Unary: os << "(-" << to_string(n->args[0]) << ")"; break;
        case NodeKind::Binary:
            os << "(" << to_string(n->args[0]) << n->op << to_string(n->args[1]) << ")";
            break;
        case NodeKind::Call: {
            os << n->call << "(";
            for (std::size_t i = 0; i < n->args.size(); ++i) {
                if (i) os << ",";
                os << to_string(n->args[i]);
            }
            os << ")";
            break;
        }
    }
    return os.str();
}

ScalarField compile(const NodePtr& node, const CompileOptions& opts) {
    const int used = max_variable(node);
    if (used > opts.dim)
        throw ConfigError("expression uses x" + std::to_string(used) +
                          " but the dimension is " + std::to_string(opts.dim));

    // a bare lacunary(...) call carries its own certified constants
    if (node->kind == NodeKind::Call && node->call == "lacunary") {
        const double alpha = node->args[0]->number;
        const int m = static_cast<int>(node->args[1]->number);
        const int axis = node->args.size() == 3 ? node->args[2]->var_axis : 0;
        auto field = lacunary_series(alpha, m, LacunaryKind::cosine_1d, axis, opts.dim);
        if (opts.alpha && *opts.alpha != alpha)
            throw ConfigError("declared alpha conflicts with lacunary(alpha, m)");
        return field;
    }

    ScalarField f;
    f.eval = build_eval(node);
    f.exponent = opts.alpha.value_or(1.0);
    f.label = to_string(node);
    if (opts.holder_bound) {
        f.holder_bound = *opts.holder_bound;
        f.certified = true;
    } else if (opts.domain) {
        f.holder_bound =
            estimate_holder_constant(f.eval, *opts.domain, f.exponent, opts.estimate_samples);
        f.certified = false;  // sampled lower bound, heuristic
    }
    if (opts.sup_bound) {
        f.sup_bound = *opts.sup_bound;
    } else if (opts.domain) {
        f.sup_bound = estimate_sup(f.eval, *opts.domain, opts.estimate_samples);
    }
    return f;
}

ScalarField compile(const std::string& text, const CompileOptions& opts) {
    return compile(parse_field_expr(text), opts);
}

}  // namespace snowflake::expr
