#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "matrix.hpp"
#include "schema.hpp"

namespace f4f {

// Parsed CSV contents with cells re-ordered into schema column order.
struct RawTable {
    FeatureSchema schema;
    std::vector<std::vector<std::string>> rows;
    std::size_t dropped_missing = 0;  // rows removed for containing the missing token
};

struct NumericTransform {
    double mean = 0.0;
    double std = 1.0;  // population standard deviation
};

// Where each schema column lands inside an encoded design matrix:
// categorical columns occupy a one-hot group of `width` columns, numerics a
// single standardized column.
struct LayoutEntry {
    std::size_t column = 0;  // schema column index
    std::size_t offset = 0;
    std::size_t width = 1;
};

struct FeatureLayout {
    std::vector<LayoutEntry> entries;
    std::size_t total_width = 0;

    // x space: every column except sensitive and target
    static FeatureLayout features(const FeatureSchema& schema);
    // autoencoder space: the feature columns plus the target appended as a
    // final one-hot group, so the decoder learns to emit labels
    static FeatureLayout features_with_target(const FeatureSchema& schema);
};

// Numeric design matrix plus sensitive/target vectors and the transforms
// needed to invert the encoding. Immutable after construction.
struct EncodedDataset {
    FeatureSchema schema;
    FeatureLayout layout;  // layout of x
    Matrix x;              // n×d, one-hot categoricals + standardized numerics
    std::vector<int> s;    // sensitive level index per row
    Matrix s_onehot;       // n×|S|
    std::vector<int> y;    // 0/1, positive class = second target level
    std::vector<NumericTransform> transforms;  // per schema column (numerics only used)
    std::vector<std::size_t> source_rows;      // indices into the loaded table

    std::size_t rows() const { return x.rows(); }
    std::size_t feature_dim() const { return x.cols(); }
    std::vector<double> s_marginal() const;
    Matrix y_onehot() const;  // n×2
    Matrix vae_input() const;  // hconcat(x, y_onehot)

    json to_json() const;
    static EncodedDataset from_json(const json& j);
    void save(const std::string& path) const;
    static EncodedDataset load(const std::string& path);
};

struct Batch {
    Matrix x;
    Matrix s_onehot;
    std::vector<int> s;
    std::vector<int> y;
    std::vector<std::size_t> indices;  // source row indices within the dataset

    std::size_t size() const { return x.rows(); }
};

RawTable load_csv(const std::string& path, const FeatureSchema& schema);

EncodedDataset encode(const RawTable& table);

// Encode re-using fixed numeric transforms (no statistics are fit); embeds
// e.g. synthetic records into the space of an existing split.
EncodedDataset encode_with_transforms(const RawTable& table,
                                      const std::vector<NumericTransform>& transforms);

// Deterministic shuffled partition; standardization statistics are recomputed
// on the train side and re-applied to both halves.
std::pair<EncodedDataset, EncodedDataset> split(const EncodedDataset& ds,
                                                double test_fraction,
                                                std::uint64_t seed);

// One epoch of batches covering every row exactly once; the last batch may be
// smaller. Order is deterministic given the seed.
std::vector<Batch> batches(const EncodedDataset& ds, std::size_t batch_size,
                           std::uint64_t shuffle_seed);

// Inverts decoder outputs laid out per `layout` back into record strings:
// argmax within each one-hot group, de-standardization for numerics. Returns
// one vector of cell strings per row, ordered like layout.entries.
std::vector<std::vector<std::string>> decode_records(
    const Matrix& outputs, const FeatureLayout& layout, const FeatureSchema& schema,
    const std::vector<NumericTransform>& transforms);

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace f4f
