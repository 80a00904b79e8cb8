#include "patrec/error.hpp"

namespace patrec {

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::io_error: return "IoError";
        case errc::missing_column: return "MissingColumn";
        case errc::non_numeric_feature: return "NonNumericFeature";
        case errc::ragged_rows: return "RaggedRows";
        case errc::empty_file: return "EmptyFile";
        case errc::unknown_class: return "UnknownClass";
        case errc::index_out_of_range: return "IndexOutOfRange";
        case errc::row_count_mismatch: return "RowCountMismatch";
        case errc::target_conflict: return "TargetConflict";
        case errc::missing_targets: return "MissingTargets";
        case errc::degenerate_data: return "DegenerateData";
        case errc::single_class: return "SingleClass";
        case errc::too_few_per_class: return "TooFewPerClass";
        case errc::not_binary: return "NotBinary";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::not_trained: return "NotTrained";
        case errc::empty_dataset: return "EmptyDataSet";
        case errc::too_many_components: return "TooManyComponents";
        case errc::bad_k: return "BadK";
        case errc::one_class_only: return "OneClassOnly";
        case errc::multiple_score_columns: return "MultipleScoreColumns";
        case errc::syntax_error: return "SyntaxError";
        case errc::unknown_action: return "UnknownAction";
        case errc::bad_arity: return "BadArity";
        case errc::bad_param_name: return "BadParamName";
        case errc::bad_param_value: return "BadParamValue";
    }
    return "Error";
}

}  // namespace patrec
