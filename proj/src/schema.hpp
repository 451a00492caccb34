#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json_util.hpp"

namespace f4f {

enum class ColumnKind { categorical, numeric };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    // categorical only: the ordered level strings. For binary targets the
    // second level is the positive class.
    std::vector<std::string> levels;
    // categorical only, optional: values outside `levels` are mapped to this
    // level instead of raising an unknown-level error (used to collapse
    // e.g. race into a two-group form)
    std::optional<std::string> collapse_other_to;

    int level_index(const std::string& value) const;
};

// Declarative description of a tabular dataset: column names/kinds, which
// column is the sensitive attribute and which the binary prediction target.
struct FeatureSchema {
    std::vector<Column> columns;
    std::string sensitive_column;
    std::string target_column;
    // rows containing this token in any cell are dropped at load time
    std::string missing_token = "?";

    static FeatureSchema from_json(const json& j);
    static FeatureSchema load(const std::string& path);
    json to_json() const;

    void validate() const;
    std::size_t column_index(const std::string& name) const;
    const Column& column(const std::string& name) const;
    std::size_t sensitive_index() const { return column_index(sensitive_column); }
    std::size_t target_index() const { return column_index(target_column); }
    std::size_t sensitive_levels() const { return column(sensitive_column).levels.size(); }

    // stable content hash; ties serialized models to the schema they were
    // trained against
    std::uint64_t hash() const;
};

}  // namespace f4f
