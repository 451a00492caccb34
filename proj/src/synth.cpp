#include "synth.hpp"

#include <algorithm>
#include <fstream>

#include "error.hpp"

namespace f4f {

const char* sensitive_strategy_name(SensitiveStrategy s) {
    return s == SensitiveStrategy::empirical ? "empirical" : "fixed";
}

SensitiveStrategy sensitive_strategy_from_name(const std::string& name) {
    if (name == "empirical") return SensitiveStrategy::empirical;
    if (name == "fixed") return SensitiveStrategy::fixed;
    throw ValidationError("s_strategy must be \"empirical\" or \"fixed\", got \"" + name +
                          "\"");
}

std::vector<int> sample_sensitive(SensitiveStrategy strategy, const std::string& fixed_level,
                                  std::size_t n, const FeatureSchema& schema,
                                  const std::vector<double>& marginal, std::uint64_t seed) {
    const Column& s_col = schema.column(schema.sensitive_column);
    std::vector<int> out(n, 0);
    if (strategy == SensitiveStrategy::fixed) {
        int level = -1;
        for (std::size_t i = 0; i < s_col.levels.size(); ++i)
            if (s_col.levels[i] == fixed_level) level = static_cast<int>(i);
        if (level < 0)
            throw ValidationError("sample_sensitive: \"" + fixed_level +
                                  "\" is not a level of column \"" + s_col.name + "\"");
        std::fill(out.begin(), out.end(), level);
        return out;
    }
    if (marginal.size() != s_col.levels.size())
        throw ValidationError("sample_sensitive: marginal length does not match level count");
    // inverse-CDF draw from the empirical marginal
    std::vector<double> cdf(marginal.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < marginal.size(); ++i) {
        acc += marginal[i];
        cdf[i] = acc;
    }
    Rng rng(mix_seed(seed, 0x5e45ULL));
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * acc;
        int level = static_cast<int>(marginal.size()) - 1;
        for (std::size_t g = 0; g < cdf.size(); ++g)
            if (u < cdf[g]) {
                level = static_cast<int>(g);
                break;
            }
        out[i] = level;
    }
    return out;
}

SyntheticDataset generate(const Student& student, const Teacher& teacher,
                          const FeatureSchema& schema,
                          const std::vector<NumericTransform>& transforms,
                          const std::vector<double>& s_marginal, const GenerateConfig& cfg) {
    schema.validate();
    if (teacher.schema_hash() != schema.hash() || student.schema_hash() != schema.hash())
        throw ValidationError(
            "generate: model/schema hashes differ; teacher, student and schema must come "
            "from the same preparation");
    if (student.latent_dim() != teacher.latent_dim())
        throw ValidationError("generate: student latent width " +
                              std::to_string(student.latent_dim()) +
                              " does not match teacher latent width " +
                              std::to_string(teacher.latent_dim()));
    const FeatureLayout layout = FeatureLayout::features_with_target(schema);
    if (layout.total_width != teacher.input_dim())
        throw ValidationError("generate: schema encodes to width " +
                              std::to_string(layout.total_width) +
                              " but the teacher decodes width " +
                              std::to_string(teacher.input_dim()));

    SyntheticDataset out;
    out.schema = schema;
    out.records.reserve(cfg.n_samples);

    const std::vector<int> s = sample_sensitive(cfg.strategy, cfg.fixed_level, cfg.n_samples,
                                                schema, s_marginal, cfg.seed);
    const std::size_t s_col = schema.sensitive_index();
    const std::size_t n_groups = schema.sensitive_levels();

    const std::size_t chunk = 8192;
    for (std::size_t start = 0; start < cfg.n_samples; start += chunk) {
        const std::size_t count = std::min(chunk, cfg.n_samples - start);
        const std::uint64_t stream = start / chunk;
        const Matrix noise = sample_standard_normal(
            count, student.noise_dim(), mix_seed(cfg.seed, 0x6e010000ULL + 2 * stream));
        const Matrix eps = sample_standard_normal(
            count, student.latent_dim(), mix_seed(cfg.seed, 0x6e010000ULL + 2 * stream + 1));
        const StudentForward fwd = student.forward(noise, eps);

        Matrix s_onehot(count, n_groups);
        for (std::size_t i = 0; i < count; ++i)
            s_onehot(i, static_cast<std::size_t>(s[start + i])) = 1.0;

        const Matrix decoded = teacher.decode(fwd.z, s_onehot);
        require_finite(decoded, "generate");
        const auto cells = decode_records(decoded, layout, schema, transforms);

        for (std::size_t i = 0; i < count; ++i) {
            std::vector<std::string> record(schema.columns.size());
            for (std::size_t e = 0; e < layout.entries.size(); ++e)
                record[layout.entries[e].column] = cells[i][e];
            record[s_col] =
                schema.columns[s_col].levels[static_cast<std::size_t>(s[start + i])];
            out.records.push_back(std::move(record));
        }
    }

    out.provenance["format"] = "fair4free-synthetic/1";
    out.provenance["schema_hash"] = hash_hex(schema.hash());
    out.provenance["n_samples"] = cfg.n_samples;
    out.provenance["seed"] = cfg.seed;
    out.provenance["s_strategy"] = sensitive_strategy_name(cfg.strategy);
    if (cfg.strategy == SensitiveStrategy::fixed)
        out.provenance["s_fixed_level"] = cfg.fixed_level;
    return out;
}

void write_synthetic_csv(const SyntheticDataset& ds, const std::string& path) {
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw ValidationError("cannot write file: " + path);
    for (std::size_t c = 0; c < ds.schema.columns.size(); ++c) {
        if (c) outf << ',';
        outf << ds.schema.columns[c].name;
    }
    outf << '\n';
    for (const auto& record : ds.records) {
        for (std::size_t c = 0; c < record.size(); ++c) {
            if (c) outf << ',';
            outf << record[c];
        }
        outf << '\n';
    }
    if (!outf) throw ValidationError("write failed: " + path);
}

}  // namespace f4f
