#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace patrec {

/// Error categories raised by the library. Names follow the failing
/// contract, not the call site.
enum class errc {
    // ingestion
    io_error,
    missing_column,
    non_numeric_feature,
    ragged_rows,
    empty_file,
    unknown_class,
    index_out_of_range,
    row_count_mismatch,
    target_conflict,
    // training / running
    missing_targets,
    degenerate_data,
    single_class,
    too_few_per_class,
    not_binary,
    dimension_mismatch,
    not_trained,
    empty_dataset,
    too_many_components,
    bad_k,
    one_class_only,
    multiple_score_columns,
    // pipeline text
    syntax_error,
    unknown_action,
    bad_arity,
    bad_param_name,
    bad_param_value,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

/// Pipeline-text parse failure with a position inside the source string
/// (1-based line/column) and the token set the parser would have accepted.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, int line, int column,
                std::vector<std::string> expected = {})
        : Error(errc::syntax_error,
                std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), expected_(std::move(expected)) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    int line_;
    int column_;
    std::vector<std::string> expected_;
};

}  // namespace patrec
