#include "eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "error.hpp"

namespace f4f {

std::vector<std::pair<std::string, double>> aggregate_importance(
    const Forest& forest, const FeatureSchema& schema, const FeatureLayout& layout) {
    const std::vector<double>& raw = forest.raw_importance();
    if (raw.size() != layout.total_width + schema.sensitive_levels())
        throw DimensionError("aggregate_importance: forest feature count does not match "
                             "layout plus sensitive one-hot");

    std::vector<std::pair<std::string, double>> scores;
    double total = 0.0;
    for (const LayoutEntry& e : layout.entries) {
        double acc = 0.0;
        for (std::size_t j = 0; j < e.width; ++j) acc += raw[e.offset + j];
        scores.emplace_back(schema.columns[e.column].name, acc);
        total += acc;
    }
    double s_acc = 0.0;
    for (std::size_t j = 0; j < schema.sensitive_levels(); ++j)
        s_acc += raw[layout.total_width + j];
    scores.emplace_back(schema.sensitive_column, s_acc);
    total += s_acc;

    if (total <= 0.0)
        throw ValidationError("aggregate_importance: forest never split; importances "
                              "are undefined");
    for (auto& [name, v] : scores) v /= total;
    return scores;
}

namespace {

Matrix forest_features(const EncodedDataset& ds) { return hconcat(ds.x, ds.s_onehot); }

EvalReport evaluate_common(const EncodedDataset& train_like, const EncodedDataset& real_test,
                           const EvalConfig& cfg) {
    Forest forest = Forest::fit(forest_features(train_like), train_like.y, cfg.forest);
    const std::vector<int> yhat = forest.predict(forest_features(real_test));

    EvalReport report;
    const std::size_t groups = real_test.schema.sensitive_levels();
    report.dpr = demographic_parity_ratio(yhat, real_test.s, groups);
    report.eor = equalized_odds_ratio(yhat, real_test.y, real_test.s, groups);
    const UtilityMetrics u = utility_metrics(yhat, real_test.y);
    report.accuracy = u.accuracy;
    report.recall = u.recall;
    report.f1 = u.f1;
    report.feature_importances =
        aggregate_importance(forest, train_like.schema, train_like.layout);

    report.config_echo["forest"] = {{"n_trees", cfg.forest.n_trees},
                                    {"max_depth", cfg.forest.max_depth},
                                    {"features_per_split", cfg.forest.features_per_split},
                                    {"bootstrap", cfg.forest.bootstrap},
                                    {"seed", cfg.forest.seed}};
    report.config_echo["knn_k"] = cfg.knn_k;
    return report;
}

}  // namespace

EvalReport evaluate_synthetic(const EncodedDataset& real_test, const SyntheticDataset& synth,
                              const EvalConfig& cfg) {
    if (synth.records.empty())
        throw ValidationError("evaluate_synthetic: synthetic dataset is empty");
    if (synth.schema.hash() != real_test.schema.hash())
        throw ValidationError("evaluate_synthetic: synthetic schema does not match the "
                              "test split's schema");

    // embed the synthetic records with the real split's transforms so both
    // samples live in the same space
    RawTable table;
    table.schema = synth.schema;
    table.rows = synth.records;
    const EncodedDataset synth_enc = encode_with_transforms(table, real_test.transforms);

    EvalReport report = evaluate_common(synth_enc, real_test, cfg);
    const DensityCoverage dc = density_coverage(real_test.x, synth_enc.x, cfg.knn_k);
    report.density = dc.density;
    report.coverage = dc.coverage;
    report.provenance = synth.provenance;
    return report;
}

EvalReport evaluate_real_baseline(const EncodedDataset& real_train,
                                  const EncodedDataset& real_test, const EvalConfig& cfg) {
    EvalReport report = evaluate_common(real_train, real_test, cfg);
    report.provenance["format"] = "fair4free-baseline/1";
    report.provenance["training_data"] = "real train split";
    return report;
}

json EvalReport::to_json() const {
    json j;
    j["format"] = "fair4free-report/1";
    j["fairness"] = {{"dpr", dpr}, {"eor", eor}};
    j["utility"] = {{"accuracy", accuracy}, {"recall", recall}, {"f1", f1}};
    if (density && coverage)
        j["synthetic_quality"] = {{"density", *density}, {"coverage", *coverage}};
    else
        j["synthetic_quality"] = nullptr;
    json imp = json::object();
    for (const auto& [name, v] : feature_importances) imp[name] = v;
    j["feature_importances"] = imp;
    j["config"] = config_echo;
    j["provenance"] = provenance;
    return j;
}

PcaOverlap pca_overlap(const Teacher& teacher, const Student& student,
                       const EncodedDataset& ds, std::size_t points, std::uint64_t seed) {
    if (teacher.latent_dim() != student.latent_dim())
        throw ValidationError("pca_overlap: latent widths differ");
    if (points < 2) throw ValidationError("pca_overlap: need at least 2 points");

    // teacher side: reparameterized latents of sampled dataset rows
    const std::size_t n_teacher = std::min(points, ds.rows());
    Rng pick_rng(mix_seed(seed, 0x9ca0ULL));
    std::vector<std::size_t> rows = random_permutation(ds.rows(), pick_rng);
    rows.resize(n_teacher);
    std::sort(rows.begin(), rows.end());

    EncodedDataset sub;
    sub.schema = ds.schema;
    sub.layout = ds.layout;
    sub.transforms = ds.transforms;
    sub.x = take_rows(ds.x, rows);
    sub.s_onehot = take_rows(ds.s_onehot, rows);
    for (std::size_t r : rows) {
        sub.s.push_back(ds.s[r]);
        sub.y.push_back(ds.y[r]);
        sub.source_rows.push_back(r);
    }
    const GaussianLatent lat = teacher.encode(sub.vae_input(), sub.s_onehot);
    const Matrix z_teacher = reparameterize(
        lat, sample_standard_normal(n_teacher, teacher.latent_dim(), mix_seed(seed, 0x9ca1ULL)));

    // student side: pure noise draws
    const Matrix noise =
        sample_standard_normal(points, student.noise_dim(), mix_seed(seed, 0x9ca2ULL));
    const Matrix eps =
        sample_standard_normal(points, student.latent_dim(), mix_seed(seed, 0x9ca3ULL));
    const Matrix z_student = student.forward(noise, eps).z;

    PcaOverlap out;
    out.projection = pca_project(z_teacher, z_student, 2);
    out.energy = energy_distance(out.projection.projected_a, out.projection.projected_b);

    auto moments = [](const Matrix& m, std::vector<double>& mean, std::vector<double>& sd) {
        mean.assign(m.cols(), 0.0);
        sd.assign(m.cols(), 0.0);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t c = 0; c < m.cols(); ++c) mean[c] += m(i, c);
        for (double& v : mean) v /= static_cast<double>(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t c = 0; c < m.cols(); ++c) {
                const double d = m(i, c) - mean[c];
                sd[c] += d * d;
            }
        for (double& v : sd) v = std::sqrt(v / static_cast<double>(m.rows()));
    };
    moments(z_teacher, out.teacher_mean, out.teacher_std);
    moments(z_student, out.student_mean, out.student_std);
    return out;
}

void write_pca_csv(const PcaOverlap& overlap, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << "set,dim1,dim2\n";
    const auto dump = [&](const Matrix& m, const char* label) {
        for (std::size_t i = 0; i < m.rows(); ++i)
            out << label << ',' << format_double(m(i, 0)) << ',' << format_double(m(i, 1))
                << '\n';
    };
    dump(overlap.projection.projected_a, "teacher");
    dump(overlap.projection.projected_b, "student");
    if (!out) throw ValidationError("write failed: " + path);
}

void write_pca_svg(const PcaOverlap& overlap, const std::string& path) {
    const Matrix& a = overlap.projection.projected_a;
    const Matrix& b = overlap.projection.projected_b;
    double lo[2] = {a(0, 0), a(0, 1)}, hi[2] = {a(0, 0), a(0, 1)};
    for (const Matrix* m : {&a, &b})
        for (std::size_t i = 0; i < m->rows(); ++i)
            for (std::size_t c = 0; c < 2; ++c) {
                lo[c] = std::min(lo[c], (*m)(i, c));
                hi[c] = std::max(hi[c], (*m)(i, c));
            }
    for (std::size_t c = 0; c < 2; ++c) {
        const double pad = 0.05 * (hi[c] - lo[c] + 1e-12);
        lo[c] -= pad;
        hi[c] += pad;
    }
    const double width = 640.0, height = 480.0, margin = 40.0;
    auto sx = [&](double v) {
        return margin + (v - lo[0]) / (hi[0] - lo[0]) * (width - 2 * margin);
    };
    auto sy = [&](double v) {
        return height - margin - (v - lo[1]) / (hi[1] - lo[1]) * (height - 2 * margin);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const auto scatter = [&](const Matrix& m, const char* color) {
        for (std::size_t i = 0; i < m.rows(); ++i)
            out << "<circle cx=\"" << sx(m(i, 0)) << "\" cy=\"" << sy(m(i, 1))
                << "\" r=\"2\" fill=\"" << color << "\" fill-opacity=\"0.5\"/>\n";
    };
    scatter(a, "#1f77b4");
    scatter(b, "#ff7f0e");
    out << "<text x=\"" << margin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">"
        << "<tspan fill=\"#1f77b4\">teacher latents</tspan>"
        << "  <tspan fill=\"#ff7f0e\" dx=\"12\">student samples</tspan></text>\n";
    out << "</svg>\n";
    if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace f4f
