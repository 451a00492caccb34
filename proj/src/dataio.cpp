#include "dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace f4f {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_numeric(const std::string& cell, std::size_t line_no, const std::string& col) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ValidationError("line " + std::to_string(line_no) + ", column \"" + col +
                              "\": cannot parse \"" + cell + "\" as a number");
    return v;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

FeatureLayout FeatureLayout::features(const FeatureSchema& schema) {
    FeatureLayout layout;
    const std::size_t skip_s = schema.sensitive_index();
    const std::size_t skip_t = schema.target_index();
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        if (c == skip_s || c == skip_t) continue;
        const Column& col = schema.columns[c];
        LayoutEntry e;
        e.column = c;
        e.offset = layout.total_width;
        e.width = col.kind == ColumnKind::categorical ? col.levels.size() : 1;
        layout.total_width += e.width;
        layout.entries.push_back(e);
    }
    return layout;
}

FeatureLayout FeatureLayout::features_with_target(const FeatureSchema& schema) {
    FeatureLayout layout = features(schema);
    LayoutEntry e;
    e.column = schema.target_index();
    e.offset = layout.total_width;
    e.width = schema.columns[e.column].levels.size();
    layout.total_width += e.width;
    layout.entries.push_back(e);
    return layout;
}

RawTable load_csv(const std::string& path, const FeatureSchema& schema) {
    schema.validate();
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("dataset file is empty: " + path);
    std::vector<std::string> header = split_line(line);

    // header must be a permutation of the schema columns
    std::vector<std::size_t> file_to_schema(header.size());
    std::vector<bool> seen(schema.columns.size(), false);
    for (std::size_t i = 0; i < header.size(); ++i) {
        bool found = false;
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            if (schema.columns[c].name == header[i]) {
                if (seen[c])
                    throw ValidationError(path + ": duplicate column \"" + header[i] +
                                          "\" in header");
                seen[c] = true;
                file_to_schema[i] = c;
                found = true;
                break;
            }
        }
        if (!found)
            throw ValidationError(path + ": column \"" + header[i] +
                                  "\" in header is not part of the schema");
    }
    for (std::size_t c = 0; c < schema.columns.size(); ++c)
        if (!seen[c])
            throw ValidationError(path + ": schema column \"" + schema.columns[c].name +
                                  "\" missing from header");

    RawTable table;
    table.schema = schema;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw ValidationError(path + ": line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
        bool missing = false;
        for (const std::string& cell : cells)
            if (cell == schema.missing_token) {
                missing = true;
                break;
            }
        if (missing) {
            ++table.dropped_missing;
            continue;
        }
        std::vector<std::string> row(schema.columns.size());
        for (std::size_t i = 0; i < cells.size(); ++i) row[file_to_schema[i]] = cells[i];
        // validate kinds eagerly so the error names the offending line
        for (std::size_t c = 0; c < row.size(); ++c) {
            const Column& col = schema.columns[c];
            if (col.kind == ColumnKind::numeric) {
                parse_numeric(row[c], line_no, col.name);
            } else if (col.level_index(row[c]) < 0) {
                throw ValidationError(path + ": line " + std::to_string(line_no) +
                                      ", column \"" + col.name + "\": unknown level \"" +
                                      row[c] + "\"");
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

EncodedDataset encode_impl(const RawTable& table, std::vector<NumericTransform> transforms);

}  // namespace

EncodedDataset encode(const RawTable& table) {
    const FeatureSchema& schema = table.schema;
    const std::size_t n = table.rows.size();
    if (n == 0) throw ValidationError("encode: dataset has no rows");

    const FeatureLayout layout = FeatureLayout::features(schema);
    std::vector<NumericTransform> transforms(schema.columns.size());

    // numeric statistics over the table's own rows
    for (const LayoutEntry& e : layout.entries) {
        const Column& col = schema.columns[e.column];
        if (col.kind != ColumnKind::numeric) continue;
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            mean += parse_numeric(table.rows[i][e.column], i + 2, col.name);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = parse_numeric(table.rows[i][e.column], i + 2, col.name) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        if (var == 0.0)
            throw ValidationError("encode: numeric column \"" + col.name +
                                  "\" has zero variance; drop it or mark it as a "
                                  "constant categorical column");
        transforms[e.column] = NumericTransform{mean, std::sqrt(var)};
    }
    return encode_impl(table, std::move(transforms));
}

EncodedDataset encode_with_transforms(const RawTable& table,
                                      const std::vector<NumericTransform>& transforms) {
    if (table.rows.empty()) throw ValidationError("encode: dataset has no rows");
    if (transforms.size() != table.schema.columns.size())
        throw ValidationError("encode_with_transforms: transform count does not match schema");
    return encode_impl(table, transforms);
}

namespace {

EncodedDataset encode_impl(const RawTable& table, std::vector<NumericTransform> transforms) {
    const FeatureSchema& schema = table.schema;
    const std::size_t n = table.rows.size();

    EncodedDataset ds;
    ds.schema = schema;
    ds.layout = FeatureLayout::features(schema);
    ds.transforms = std::move(transforms);
    ds.source_rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.source_rows[i] = i;

    ds.x = Matrix(n, ds.layout.total_width);
    const std::size_t s_col = schema.sensitive_index();
    const std::size_t t_col = schema.target_index();
    const std::size_t n_groups = schema.columns[s_col].levels.size();
    ds.s.resize(n);
    ds.y.resize(n);
    ds.s_onehot = Matrix(n, n_groups);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = table.rows[i];
        for (const LayoutEntry& e : ds.layout.entries) {
            const Column& col = schema.columns[e.column];
            if (col.kind == ColumnKind::categorical) {
                int idx = col.level_index(row[e.column]);
                ds.x(i, e.offset + static_cast<std::size_t>(idx)) = 1.0;
            } else {
                const NumericTransform& t = ds.transforms[e.column];
                double v = parse_numeric(row[e.column], i + 2, col.name);
                ds.x(i, e.offset) = (v - t.mean) / t.std;
            }
        }
        ds.s[i] = schema.columns[s_col].level_index(row[s_col]);
        ds.s_onehot(i, static_cast<std::size_t>(ds.s[i])) = 1.0;
        ds.y[i] = schema.columns[t_col].level_index(row[t_col]);
    }
    return ds;
}

}  // namespace

std::vector<double> EncodedDataset::s_marginal() const {
    std::vector<double> p(s_onehot.cols(), 0.0);
    for (int g : s) p[static_cast<std::size_t>(g)] += 1.0;
    for (double& v : p) v /= static_cast<double>(rows());
    return p;
}

Matrix EncodedDataset::y_onehot() const {
    Matrix m(rows(), 2);
    for (std::size_t i = 0; i < rows(); ++i) m(i, static_cast<std::size_t>(y[i])) = 1.0;
    return m;
}

Matrix EncodedDataset::vae_input() const { return hconcat(x, y_onehot()); }

namespace {

// subset of a dataset by row indices, keeping the current transforms
EncodedDataset subset(const EncodedDataset& ds, const std::vector<std::size_t>& idx) {
    EncodedDataset out;
    out.schema = ds.schema;
    out.layout = ds.layout;
    out.transforms = ds.transforms;
    out.x = take_rows(ds.x, idx);
    out.s_onehot = take_rows(ds.s_onehot, idx);
    out.s.reserve(idx.size());
    out.y.reserve(idx.size());
    out.source_rows.reserve(idx.size());
    for (std::size_t i : idx) {
        out.s.push_back(ds.s[i]);
        out.y.push_back(ds.y[i]);
        out.source_rows.push_back(ds.source_rows[i]);
    }
    return out;
}

// re-standardize the numeric columns of both splits with statistics computed
// on the train split only
void restandardize(EncodedDataset& train, EncodedDataset& test) {
    for (const LayoutEntry& e : train.layout.entries) {
        const Column& col = train.schema.columns[e.column];
        if (col.kind != ColumnKind::numeric) continue;
        const NumericTransform old = train.transforms[e.column];
        const std::size_t n = train.rows();
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            mean += train.x(i, e.offset) * old.std + old.mean;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = (train.x(i, e.offset) * old.std + old.mean) - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        if (var == 0.0)
            throw ValidationError("split: numeric column \"" + col.name +
                                  "\" has zero variance on the train split");
        const NumericTransform fresh{mean, std::sqrt(var)};
        for (EncodedDataset* part : {&train, &test}) {
            for (std::size_t i = 0; i < part->rows(); ++i) {
                double raw = part->x(i, e.offset) * old.std + old.mean;
                part->x(i, e.offset) = (raw - fresh.mean) / fresh.std;
            }
            part->transforms[e.column] = fresh;
        }
    }
}

}  // namespace

std::pair<EncodedDataset, EncodedDataset> split(const EncodedDataset& ds,
                                                double test_fraction,
                                                std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ValidationError("split: test_fraction must be in (0, 1)");
    const std::size_t n = ds.rows();
    const auto n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * test_fraction));
    if (n_test == 0 || n_test >= n)
        throw ValidationError("split: fraction " + format_double(test_fraction) +
                              " leaves an empty side for " + std::to_string(n) + " rows");

    Rng rng(seed);
    std::vector<std::size_t> perm = random_permutation(n, rng);
    std::vector<std::size_t> test_idx(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train_idx(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    EncodedDataset train = subset(ds, train_idx);
    EncodedDataset test = subset(ds, test_idx);
    restandardize(train, test);
    return {std::move(train), std::move(test)};
}

std::vector<Batch> batches(const EncodedDataset& ds, std::size_t batch_size,
                           std::uint64_t shuffle_seed) {
    if (batch_size < 1) throw ValidationError("batches: batch_size must be >= 1");
    Rng rng(shuffle_seed);
    std::vector<std::size_t> perm = random_permutation(ds.rows(), rng);
    std::vector<Batch> out;
    for (std::size_t start = 0; start < perm.size(); start += batch_size) {
        const std::size_t end = std::min(start + batch_size, perm.size());
        std::vector<std::size_t> idx(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                     perm.begin() + static_cast<std::ptrdiff_t>(end));
        Batch b;
        b.x = take_rows(ds.x, idx);
        b.s_onehot = take_rows(ds.s_onehot, idx);
        b.s.reserve(idx.size());
        b.y.reserve(idx.size());
        for (std::size_t i : idx) {
            b.s.push_back(ds.s[i]);
            b.y.push_back(ds.y[i]);
        }
        b.indices = std::move(idx);
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<std::vector<std::string>> decode_records(
    const Matrix& outputs, const FeatureLayout& layout, const FeatureSchema& schema,
    const std::vector<NumericTransform>& transforms) {
    if (outputs.cols() != layout.total_width)
        throw DimensionError("decode_records: outputs have width " +
                             std::to_string(outputs.cols()) + ", layout expects " +
                             std::to_string(layout.total_width));
    std::vector<std::vector<std::string>> records(outputs.rows());
    for (std::size_t i = 0; i < outputs.rows(); ++i) {
        records[i].reserve(layout.entries.size());
        for (const LayoutEntry& e : layout.entries) {
            const Column& col = schema.columns[e.column];
            if (col.kind == ColumnKind::categorical) {
                std::size_t best = 0;
                for (std::size_t j = 1; j < e.width; ++j)
                    if (outputs(i, e.offset + j) > outputs(i, e.offset + best)) best = j;
                records[i].push_back(col.levels[best]);
            } else {
                const NumericTransform& t = transforms[e.column];
                records[i].push_back(format_double(outputs(i, e.offset) * t.std + t.mean));
            }
        }
    }
    return records;
}

json EncodedDataset::to_json() const {
    json j;
    j["format"] = "fair4free-dataset/1";
    j["schema"] = schema.to_json();
    j["x"] = matrix_to_json(x);
    j["s"] = s;
    j["y"] = y;
    json jt = json::array();
    for (const auto& t : transforms) jt.push_back({{"mean", t.mean}, {"std", t.std}});
    j["transforms"] = jt;
    j["source_rows"] = source_rows;
    return j;
}

EncodedDataset EncodedDataset::from_json(const json& j) {
    if (!j.contains("format") || j.at("format") != "fair4free-dataset/1")
        throw ValidationError("dataset artifact: unsupported or missing format tag");
    EncodedDataset ds;
    ds.schema = FeatureSchema::from_json(j.at("schema"));
    ds.layout = FeatureLayout::features(ds.schema);
    ds.x = matrix_from_json(j.at("x"), "dataset artifact");
    ds.s = j.at("s").get<std::vector<int>>();
    ds.y = j.at("y").get<std::vector<int>>();
    ds.source_rows = j.at("source_rows").get<std::vector<std::size_t>>();
    for (const auto& jt : j.at("transforms"))
        ds.transforms.push_back(NumericTransform{jt.at("mean").get<double>(),
                                                 jt.at("std").get<double>()});
    const std::size_t n = ds.x.rows();
    if (ds.s.size() != n || ds.y.size() != n || ds.source_rows.size() != n)
        throw ValidationError("dataset artifact: vector lengths do not match row count");
    ds.s_onehot = Matrix(n, ds.schema.sensitive_levels());
    for (std::size_t i = 0; i < n; ++i)
        ds.s_onehot(i, static_cast<std::size_t>(ds.s[i])) = 1.0;
    return ds;
}

void EncodedDataset::save(const std::string& path) const { write_json_file(to_json(), path); }

EncodedDataset EncodedDataset::load(const std::string& path) {
    return from_json(read_json_file(path));
}

}  // namespace f4f
