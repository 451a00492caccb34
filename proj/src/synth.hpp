#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distill.hpp"

namespace f4f {

enum class SensitiveStrategy { empirical, fixed };

const char* sensitive_strategy_name(SensitiveStrategy s);
SensitiveStrategy sensitive_strategy_from_name(const std::string& name);

struct GenerateConfig {
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    SensitiveStrategy strategy = SensitiveStrategy::empirical;
    std::string fixed_level;  // required for the fixed strategy
};

struct SyntheticDataset {
    FeatureSchema schema;
    // records in schema column order, sensitive and target values included
    std::vector<std::vector<std::string>> records;
    json provenance;
};

// Sensitive levels for generated rows: draws from the training marginal, or
// a constant level. The decoder needs s as conditioning and the fairness
// evaluation needs it per record, so the generator always emits it.
std::vector<int> sample_sensitive(SensitiveStrategy strategy, const std::string& fixed_level,
                                  std::size_t n, const FeatureSchema& schema,
                                  const std::vector<double>& marginal, std::uint64_t seed);

// noise -> student z' -> teacher decoder -> decoded records. Pure function
// of (models, schema, encoding state, config); chunks use sub-seeds derived
// from the master seed.
SyntheticDataset generate(const Student& student, const Teacher& teacher,
                          const FeatureSchema& schema,
                          const std::vector<NumericTransform>& transforms,
                          const std::vector<double>& s_marginal, const GenerateConfig& cfg);

void write_synthetic_csv(const SyntheticDataset& ds, const std::string& path);

}  // namespace f4f
