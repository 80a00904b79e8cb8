#include "patrec/dsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "patrec/error.hpp"
#include "patrec/format.hpp"

namespace patrec {

namespace {

struct Token {
    enum class Type { ident, number, plus, slash, lparen, rparen, comma, equals, end };

    Type type = Type::end;
    std::string text;
    double value = 0.0;  // number tokens
    int line = 1;
    int column = 1;
};

const char* token_label(Token::Type type) {
    switch (type) {
        case Token::Type::ident: return "identifier";
        case Token::Type::number: return "number";
        case Token::Type::plus: return "'+'";
        case Token::Type::slash: return "'/'";
        case Token::Type::lparen: return "'('";
        case Token::Type::rparen: return "')'";
        case Token::Type::comma: return "','";
        case Token::Type::equals: return "'='";
        case Token::Type::end: return "end of input";
    }
    return "?";
}

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> tokens;
    int line = 1;
    int column = 1;
    std::size_t i = 0;

    const auto advance = [&](std::size_t count) {
        for (std::size_t k = 0; k < count; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
    };

    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }

        Token tok;
        tok.line = line;
        tok.column = column;

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t len = 1;
            while (i + len < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i + len])) ||
                    text[i + len] == '_')) {
                ++len;
            }
            tok.type = Token::Type::ident;
            tok.text = text.substr(i, len);
            advance(len);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < text.size() &&
                    std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t len = 0;
            while (i + len < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[i + len])) ||
                    text[i + len] == '.')) {
                ++len;
            }
            if (i + len < text.size() && (text[i + len] == 'e' || text[i + len] == 'E')) {
                std::size_t exp = len + 1;
                if (i + exp < text.size() && (text[i + exp] == '+' || text[i + exp] == '-')) ++exp;
                std::size_t digits = 0;
                while (i + exp + digits < text.size() &&
                       std::isdigit(static_cast<unsigned char>(text[i + exp + digits]))) {
                    ++digits;
                }
                if (digits > 0) len = exp + digits;
            }
            tok.type = Token::Type::number;
            tok.text = text.substr(i, len);
            const char* begin = tok.text.data();
            const char* end = begin + tok.text.size();
            const auto result = std::from_chars(begin, end, tok.value);
            if (result.ec != std::errc{} || result.ptr != end) {
                throw SyntaxError("malformed number \"" + tok.text + "\"", line, column,
                                  {"number"});
            }
            advance(len);
        } else {
            switch (c) {
                case '+': tok.type = Token::Type::plus; break;
                case '/': tok.type = Token::Type::slash; break;
                case '(': tok.type = Token::Type::lparen; break;
                case ')': tok.type = Token::Type::rparen; break;
                case ',': tok.type = Token::Type::comma; break;
                case '=': tok.type = Token::Type::equals; break;
                default:
                    throw SyntaxError(std::string("unexpected character '") + c + "'", line,
                                      column);
            }
            tok.text = c;
            advance(1);
        }
        tokens.push_back(std::move(tok));
    }

    Token end_tok;
    end_tok.type = Token::Type::end;
    end_tok.line = line;
    end_tok.column = column;
    tokens.push_back(std::move(end_tok));
    return tokens;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    PipelineExpr parse_all() {
        PipelineExpr expr = parse_expr();
        if (peek().type != Token::Type::end) {
            fail("unexpected " + describe(peek()), {"'+'", "'/'", "end of input"});
        }
        return expr;
    }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;

    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_++]; }

    [[noreturn]] void fail(const std::string& message, std::vector<std::string> expected) {
        throw SyntaxError(message, peek().line, peek().column, std::move(expected));
    }

    static std::string describe(const Token& tok) {
        if (tok.type == Token::Type::end) return "end of input";
        return std::string("\"") + tok.text + "\"";
    }

    const Token& expect(Token::Type type) {
        if (peek().type != type) {
            fail(std::string("expected ") + token_label(type) + ", found " + describe(peek()),
                 {token_label(type)});
        }
        return take();
    }

    static void close_span(PipelineExpr& node, const Token& last) {
        node.span.end_line = last.line;
        node.span.end_column = last.column + static_cast<int>(last.text.size());
    }

    PipelineExpr parse_expr() {
        PipelineExpr first = parse_term();
        if (peek().type != Token::Type::plus) return first;

        PipelineExpr node;
        node.kind = PipelineExpr::Kind::plus;
        node.span = first.span;
        node.children.push_back(std::move(first));
        while (peek().type == Token::Type::plus) {
            take();
            node.children.push_back(parse_term());
        }
        node.span.end_line = node.children.back().span.end_line;
        node.span.end_column = node.children.back().span.end_column;
        return node;
    }

    PipelineExpr parse_term() {
        PipelineExpr first = parse_factor();
        if (peek().type != Token::Type::slash) return first;

        PipelineExpr node;
        node.kind = PipelineExpr::Kind::slash;
        node.span = first.span;
        node.children.push_back(std::move(first));
        while (peek().type == Token::Type::slash) {
            take();
            node.children.push_back(parse_factor());
        }
        node.span.end_line = node.children.back().span.end_line;
        node.span.end_column = node.children.back().span.end_column;
        return node;
    }

    PipelineExpr parse_factor() {
        if (peek().type == Token::Type::lparen) {
            take();
            PipelineExpr inner = parse_expr();
            const Token& close = expect(Token::Type::rparen);
            close_span(inner, close);
            return inner;
        }
        if (peek().type != Token::Type::ident) {
            fail("expected an action name or '(', found " + describe(peek()),
                 {"identifier", "'('"});
        }

        const Token& name = take();
        PipelineExpr leaf;
        leaf.kind = PipelineExpr::Kind::leaf;
        leaf.name = name.text;
        leaf.span.line = name.line;
        leaf.span.column = name.column;
        close_span(leaf, name);

        if (peek().type == Token::Type::lparen) {
            take();
            if (peek().type != Token::Type::rparen) {
                leaf.args.push_back(parse_arg());
                while (peek().type == Token::Type::comma) {
                    take();
                    leaf.args.push_back(parse_arg());
                }
            }
            const Token& close = expect(Token::Type::rparen);
            close_span(leaf, close);
        }
        return leaf;
    }

    PipelineArg parse_arg() {
        PipelineArg arg;
        if (peek().type == Token::Type::ident) {
            const Token& key = take();
            arg.key = key.text;
            arg.span.line = key.line;
            arg.span.column = key.column;
            expect(Token::Type::equals);
            const Token& value = expect(Token::Type::number);
            arg.value = value.value;
            arg.span.end_line = value.line;
            arg.span.end_column = value.column + static_cast<int>(value.text.size());
        } else if (peek().type == Token::Type::number) {
            const Token& value = take();
            arg.value = value.value;
            arg.span.line = value.line;
            arg.span.column = value.column;
            arg.span.end_line = value.line;
            arg.span.end_column = value.column + static_cast<int>(value.text.size());
        } else {
            fail("expected an argument, found " + describe(peek()), {"identifier", "number"});
        }
        return arg;
    }
};

std::string at_span(const SourceSpan& span) {
    return " (at " + std::to_string(span.line) + ":" + std::to_string(span.column) + ")";
}

// nComponents -> n_components and so on; snake_case passes through.
std::string normalize_key(const std::string& key) {
    std::string out;
    for (const char c : key) {
        if (std::isupper(static_cast<unsigned char>(c))) {
            out += '_';
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            out += c;
        }
    }
    return out;
}

int require_int(const PipelineArg& arg, const std::string& what) {
    if (!std::isfinite(arg.value) || arg.value != std::floor(arg.value) ||
        arg.value < static_cast<double>(std::numeric_limits<int>::min()) ||
        arg.value > static_cast<double>(std::numeric_limits<int>::max())) {
        throw Error(errc::bad_param_value, what + " must be an integer" + at_span(arg.span));
    }
    return static_cast<int>(arg.value);
}

double require_positive(const PipelineArg& arg, const std::string& what) {
    if (!std::isfinite(arg.value) || !(arg.value > 0.0)) {
        throw Error(errc::bad_param_value, what + " must be positive" + at_span(arg.span));
    }
    return arg.value;
}

ActionSpec lower_leaf(const PipelineExpr& leaf) {
    const std::string& name = leaf.name;

    if (name == "zmuv" || name == "map") {
        if (!leaf.args.empty()) {
            throw Error(errc::bad_arity,
                        name + " takes no arguments" + at_span(leaf.args.front().span));
        }
        return name == "zmuv" ? ActionSpec(ZmuvSpec{}) : ActionSpec(MapSpec{});
    }

    if (name == "pca") {
        if (leaf.args.size() != 1) {
            throw Error(errc::bad_arity,
                        "pca needs exactly one n_components argument" + at_span(leaf.span));
        }
        const PipelineArg& arg = leaf.args.front();
        if (arg.key && normalize_key(*arg.key) != "n_components") {
            throw Error(errc::bad_param_name,
                        "pca has no parameter \"" + *arg.key + "\"" + at_span(arg.span));
        }
        PcaSpec spec;
        spec.n_components = require_int(arg, "n_components");
        if (spec.n_components < 1) {
            throw Error(errc::bad_param_value, "n_components must be at least 1" + at_span(arg.span));
        }
        return ActionSpec(spec);
    }

    if (name == "rvm") {
        RvmSpec spec;
        bool seen_bandwidth = false;
        bool seen_max_outer = false;
        bool seen_max_inner = false;
        bool seen_grad_tol = false;
        bool seen_alpha_tol = false;
        bool seen_prune = false;

        const auto mark = [&](bool& seen, const PipelineArg& arg, const char* what) {
            if (seen) {
                throw Error(errc::bad_param_name,
                            std::string(what) + " given twice" + at_span(arg.span));
            }
            seen = true;
        };

        for (std::size_t i = 0; i < leaf.args.size(); ++i) {
            const PipelineArg& arg = leaf.args[i];
            if (!arg.key) {
                if (i != 0) {
                    throw Error(errc::bad_arity,
                                "rvm takes at most one positional argument (bandwidth)" +
                                    at_span(arg.span));
                }
                mark(seen_bandwidth, arg, "bandwidth");
                spec.kernel.bandwidth = require_positive(arg, "bandwidth");
                continue;
            }
            const std::string key = normalize_key(*arg.key);
            if (key == "bandwidth") {
                mark(seen_bandwidth, arg, "bandwidth");
                spec.kernel.bandwidth = require_positive(arg, "bandwidth");
            } else if (key == "max_outer") {
                mark(seen_max_outer, arg, "max_outer");
                spec.limits.max_outer = require_int(arg, "max_outer");
                if (spec.limits.max_outer < 1) {
                    throw Error(errc::bad_param_value,
                                "max_outer must be at least 1" + at_span(arg.span));
                }
            } else if (key == "max_inner") {
                mark(seen_max_inner, arg, "max_inner");
                spec.limits.max_inner = require_int(arg, "max_inner");
                if (spec.limits.max_inner < 1) {
                    throw Error(errc::bad_param_value,
                                "max_inner must be at least 1" + at_span(arg.span));
                }
            } else if (key == "grad_tol") {
                mark(seen_grad_tol, arg, "grad_tol");
                spec.limits.grad_tol = require_positive(arg, "grad_tol");
            } else if (key == "alpha_tol") {
                mark(seen_alpha_tol, arg, "alpha_tol");
                spec.limits.alpha_tol = require_positive(arg, "alpha_tol");
            } else if (key == "prune_threshold") {
                mark(seen_prune, arg, "prune_threshold");
                spec.limits.prune_threshold = require_positive(arg, "prune_threshold");
            } else {
                throw Error(errc::bad_param_name,
                            "rvm has no parameter \"" + *arg.key + "\"" + at_span(arg.span));
            }
        }
        return ActionSpec(spec);
    }

    throw Error(errc::unknown_action,
                "no action named \"" + name + "\"" + at_span(leaf.span) +
                    "; known actions: zmuv, pca, map, rvm");
}

enum class PrintContext { top, inside_sequential, inside_parallel };

void print_spec(const ActionSpec& spec, PrintContext context, std::string& out) {
    switch (spec.kind()) {
        case ActionKind::zmuv: out += "zmuv"; return;
        case ActionKind::map_classifier: out += "map"; return;
        case ActionKind::pca: {
            const auto& s = std::get<PcaSpec>(spec.node());
            out += "pca(" + std::to_string(s.n_components) + ")";
            return;
        }
        case ActionKind::rvm: {
            const auto& s = std::get<RvmSpec>(spec.node());
            const RvmSpec defaults;
            std::vector<std::string> parts;
            if (s.kernel.bandwidth != defaults.kernel.bandwidth) {
                parts.push_back("bandwidth=" + format_shortest(s.kernel.bandwidth));
            }
            if (s.limits.max_outer != defaults.limits.max_outer) {
                parts.push_back("max_outer=" + std::to_string(s.limits.max_outer));
            }
            if (s.limits.max_inner != defaults.limits.max_inner) {
                parts.push_back("max_inner=" + std::to_string(s.limits.max_inner));
            }
            if (s.limits.grad_tol != defaults.limits.grad_tol) {
                parts.push_back("grad_tol=" + format_shortest(s.limits.grad_tol));
            }
            if (s.limits.alpha_tol != defaults.limits.alpha_tol) {
                parts.push_back("alpha_tol=" + format_shortest(s.limits.alpha_tol));
            }
            if (s.limits.prune_threshold != defaults.limits.prune_threshold) {
                parts.push_back("prune_threshold=" + format_shortest(s.limits.prune_threshold));
            }
            out += "rvm";
            if (!parts.empty()) {
                out += '(';
                for (std::size_t i = 0; i < parts.size(); ++i) {
                    if (i > 0) out += ", ";
                    out += parts[i];
                }
                out += ')';
            }
            return;
        }
        case ActionKind::sequential: {
            // A sequential chain binds looser than '/', so it needs
            // parentheses when written inside a parallel group.
            const bool parens = context == PrintContext::inside_parallel;
            if (parens) out += '(';
            const auto& children = spec.children();
            for (std::size_t i = 0; i < children.size(); ++i) {
                if (i > 0) out += " + ";
                print_spec(children[i], PrintContext::inside_sequential, out);
            }
            if (parens) out += ')';
            return;
        }
        case ActionKind::parallel: {
            const auto& children = spec.children();
            for (std::size_t i = 0; i < children.size(); ++i) {
                if (i > 0) out += " / ";
                print_spec(children[i], PrintContext::inside_parallel, out);
            }
            return;
        }
    }
}

}  // namespace

PipelineExpr parse(const std::string& text) { return Parser(tokenize(text)).parse_all(); }

ActionSpec lower(const PipelineExpr& expr) {
    switch (expr.kind) {
        case PipelineExpr::Kind::leaf: return lower_leaf(expr);
        case PipelineExpr::Kind::plus:
        case PipelineExpr::Kind::slash: {
            if (expr.children.empty()) {
                throw Error(errc::bad_arity, "empty composition node" + at_span(expr.span));
            }
            ActionSpec combined = lower(expr.children.front());
            for (std::size_t i = 1; i < expr.children.size(); ++i) {
                ActionSpec next = lower(expr.children[i]);
                combined = expr.kind == PipelineExpr::Kind::plus
                               ? seq(std::move(combined), std::move(next))
                               : par(std::move(combined), std::move(next));
            }
            return combined;
        }
    }
    throw Error(errc::bad_arity, "malformed pipeline expression");
}

std::string print_canonical(const ActionSpec& spec) {
    std::string out;
    print_spec(spec, PrintContext::top, out);
    return out;
}

}  // namespace patrec
