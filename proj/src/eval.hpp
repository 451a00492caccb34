#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forest.hpp"
#include "metrics.hpp"
#include "synth.hpp"

namespace f4f {

struct EvalConfig {
    ForestConfig forest;
    std::size_t knn_k = 5;  // neighborhood size for density/coverage
};

struct EvalReport {
    double dpr = 0.0;
    double eor = 0.0;
    double accuracy = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // absent for the train-on-real baseline, which has no synthetic sample
    std::optional<double> density;
    std::optional<double> coverage;
    std::vector<std::pair<std::string, double>> feature_importances;  // sums to 1
    json config_echo;
    json provenance;

    json to_json() const;
};

// Impurity importances aggregated from encoded features back to original
// columns: one-hot members sum into their column, the trailing sensitive
// one-hot block sums into the sensitive column. Normalized to sum 1.
std::vector<std::pair<std::string, double>> aggregate_importance(
    const Forest& forest, const FeatureSchema& schema, const FeatureLayout& layout);

// Train-synthetic / test-real protocol: fit the forest on the encoded
// synthetic records (features are x plus the sensitive one-hot), predict the
// held-out real test split, compute fairness/utility there and
// density/coverage between the two x matrices.
EvalReport evaluate_synthetic(const EncodedDataset& real_test, const SyntheticDataset& synth,
                              const EvalConfig& cfg);

// Reference row: the same protocol with the real train split as training data.
EvalReport evaluate_real_baseline(const EncodedDataset& real_train,
                                  const EncodedDataset& real_test, const EvalConfig& cfg);

struct PcaOverlap {
    PcaProjection projection;          // a = teacher latents, b = student samples
    double energy = 0.0;               // energy distance between the projections
    std::vector<double> teacher_mean;  // per latent dimension, pre-projection
    std::vector<double> teacher_std;
    std::vector<double> student_mean;
    std::vector<double> student_std;
};

// Compares the teacher's latent distribution on a dataset against student
// samples: up to `points` teacher latents (sampled rows, reparameterized) vs
// `points` student draws, projected onto shared principal components.
PcaOverlap pca_overlap(const Teacher& teacher, const Student& student,
                       const EncodedDataset& ds, std::size_t points, std::uint64_t seed);

void write_pca_csv(const PcaOverlap& overlap, const std::string& path);
void write_pca_svg(const PcaOverlap& overlap, const std::string& path);

}  // namespace f4f
