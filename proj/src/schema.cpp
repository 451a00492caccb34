#include "schema.hpp"

#include <set>

#include "error.hpp"

namespace f4f {

int Column::level_index(const std::string& value) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i] == value) return static_cast<int>(i);
    if (collapse_other_to) {
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (levels[i] == *collapse_other_to) return static_cast<int>(i);
    }
    return -1;
}

FeatureSchema FeatureSchema::from_json(const json& j) {
    FeatureSchema s;
    if (!j.contains("columns") || !j.at("columns").is_array())
        throw ValidationError("schema: missing \"columns\" array");
    for (const auto& jc : j.at("columns")) {
        Column c;
        c.name = jc.at("name").get<std::string>();
        std::string kind = jc.at("kind").get<std::string>();
        if (kind == "categorical") {
            c.kind = ColumnKind::categorical;
            if (!jc.contains("levels") || jc.at("levels").empty())
                throw ValidationError("schema: categorical column \"" + c.name +
                                      "\" needs a non-empty \"levels\" list");
            for (const auto& l : jc.at("levels")) c.levels.push_back(l.get<std::string>());
            if (jc.contains("collapse_other_to"))
                c.collapse_other_to = jc.at("collapse_other_to").get<std::string>();
        } else if (kind == "numeric") {
            c.kind = ColumnKind::numeric;
        } else {
            throw ValidationError("schema: column \"" + c.name + "\" has unknown kind \"" +
                                  kind + "\" (expected categorical or numeric)");
        }
        s.columns.push_back(std::move(c));
    }
    if (!j.contains("sensitive") || !j.contains("target"))
        throw ValidationError("schema: missing \"sensitive\" or \"target\" field");
    s.sensitive_column = j.at("sensitive").get<std::string>();
    s.target_column = j.at("target").get<std::string>();
    if (j.contains("missing_token")) s.missing_token = j.at("missing_token").get<std::string>();
    s.validate();
    return s;
}

FeatureSchema FeatureSchema::load(const std::string& path) {
    return from_json(read_json_file(path));
}

json FeatureSchema::to_json() const {
    json j;
    j["columns"] = json::array();
    for (const auto& c : columns) {
        json jc;
        jc["name"] = c.name;
        jc["kind"] = c.kind == ColumnKind::categorical ? "categorical" : "numeric";
        if (c.kind == ColumnKind::categorical) {
            jc["levels"] = c.levels;
            if (c.collapse_other_to) jc["collapse_other_to"] = *c.collapse_other_to;
        }
        j["columns"].push_back(jc);
    }
    j["sensitive"] = sensitive_column;
    j["target"] = target_column;
    j["missing_token"] = missing_token;
    return j;
}

void FeatureSchema::validate() const {
    std::set<std::string> names;
    for (const auto& c : columns) {
        if (!names.insert(c.name).second)
            throw ValidationError("schema: duplicate column name \"" + c.name + "\"");
        if (c.kind == ColumnKind::categorical) {
            std::set<std::string> lv(c.levels.begin(), c.levels.end());
            if (lv.size() != c.levels.size())
                throw ValidationError("schema: duplicate level in column \"" + c.name + "\"");
            if (c.collapse_other_to && !lv.count(*c.collapse_other_to))
                throw ValidationError("schema: collapse_other_to of column \"" + c.name +
                                      "\" is not one of its levels");
        }
    }
    if (!names.count(sensitive_column))
        throw ValidationError("schema: sensitive column \"" + sensitive_column +
                              "\" not among columns");
    if (!names.count(target_column))
        throw ValidationError("schema: target column \"" + target_column +
                              "\" not among columns");
    const Column& s = column(sensitive_column);
    if (s.kind != ColumnKind::categorical || s.levels.size() < 2)
        throw ValidationError("schema: sensitive column must be categorical with >= 2 levels");
    const Column& t = column(target_column);
    if (t.kind != ColumnKind::categorical || t.levels.size() != 2)
        throw ValidationError("schema: target column must be categorical with exactly 2 levels");
}

std::size_t FeatureSchema::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return i;
    throw ValidationError("schema: no column named \"" + name + "\"");
}

const Column& FeatureSchema::column(const std::string& name) const {
    return columns[column_index(name)];
}

std::uint64_t FeatureSchema::hash() const { return fnv1a64(canonical_dump(to_json())); }

}  // namespace f4f
