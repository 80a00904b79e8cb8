#pragma once

#include <optional>
#include <string>
#include <vector>

#include "patrec/action.hpp"

namespace patrec {

/// 1-based position range inside the pipeline text.
struct SourceSpan {
    int line = 1;
    int column = 1;
    int end_line = 1;
    int end_column = 1;
};

struct PipelineArg {
    std::optional<std::string> key;  // absent for a positional argument
    double value = 0.0;
    SourceSpan span;
};

/// Parse tree of a pipeline expression. `+` chains collect into one plus
/// node and `/` chains into one slash node; `/` binds tighter, so
/// "a + b / c" has a slash node as the second child of the plus.
struct PipelineExpr {
    enum class Kind { leaf, plus, slash };

    Kind kind = Kind::leaf;
    std::string name;                    // leaf action name as written
    std::vector<PipelineArg> args;       // leaf arguments, in source order
    std::vector<PipelineExpr> children;  // plus / slash operands
    SourceSpan span;
};

/// Grammar:
///   expr   := term ('+' term)*
///   term   := factor ('/' factor)*
///   factor := IDENT [ '(' args ')' ] | '(' expr ')'
///   args   := arg (',' arg)*
///   arg    := NUMBER | IDENT '=' NUMBER
/// Throws SyntaxError with position and the accepted-token set.
PipelineExpr parse(const std::string& text);

/// Maps leaves onto the action registry (zmuv, pca, map, rvm), validating
/// names and arguments. Parameter keys accept camelCase aliases
/// (nComponents, maxOuter, ...). Single-child plus/slash nodes collapse to
/// the child.
ActionSpec lower(const PipelineExpr& expr);

inline ActionSpec parse_pipeline(const std::string& text) { return lower(parse(text)); }

/// Minimal text form: single spaces around operators, parentheses only
/// where precedence demands them, parameters only where they differ from
/// the defaults (pca's component count is always written). Parsing the
/// result reproduces the ActionSpec exactly.
std::string print_canonical(const ActionSpec& spec);

}  // namespace patrec
