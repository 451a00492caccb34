#include "fair4free.h"

#include <cstring>
#include <string>

#include "error.hpp"
#include "eval.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename Fn>
f4f_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return F4F_OK;
    } catch (const f4f::Error& e) {
        g_last_error = e.what();
        return e.kind() == f4f::ErrorKind::validation ? F4F_ERROR_VALIDATION
                                                      : F4F_ERROR_RUNTIME;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return F4F_ERROR_RUNTIME;
    }
}

void require_arg(const void* p, const char* name) {
    if (!p) throw f4f::ValidationError(std::string(name) + " must not be null");
}

// strict config parsing: typos should fail loudly, not silently default
class ConfigReader {
public:
    explicit ConfigReader(const char* config_json) {
        if (config_json && *config_json) {
            j_ = f4f::json::parse(config_json, nullptr, false);
            if (j_.is_discarded())
                throw f4f::ValidationError("config is not valid JSON");
            if (!j_.is_object()) throw f4f::ValidationError("config must be a JSON object");
        } else {
            j_ = f4f::json::object();
        }
    }

    template <typename T>
    T get(const char* key, T fallback) {
        seen_.push_back(key);
        if (!j_.contains(key)) return fallback;
        try {
            return j_.at(key).get<T>();
        } catch (const std::exception&) {
            throw f4f::ValidationError(std::string("config key \"") + key +
                                       "\" has the wrong type");
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool known = false;
            for (const auto& k : seen_)
                if (k == it.key()) known = true;
            if (!known)
                throw f4f::ValidationError("unknown config key \"" + it.key() + "\"");
        }
    }

private:
    f4f::json j_;
    std::vector<std::string> seen_;
};

f4f::json trace_to_json(const std::vector<f4f::TeacherEpochTrace>& trace) {
    f4f::json arr = f4f::json::array();
    for (const auto& e : trace)
        arr.push_back({{"epoch", e.epoch},
                       {"kl", e.kl},
                       {"nll", e.nll},
                       {"v2", e.v2},
                       {"total", e.total}});
    return arr;
}

f4f::json trace_to_json(const std::vector<f4f::DistillEpochTrace>& trace) {
    f4f::json arr = f4f::json::array();
    for (const auto& e : trace)
        arr.push_back({{"epoch", e.epoch},
                       {"distill", e.distill},
                       {"kl", e.kl},
                       {"total", e.total}});
    return arr;
}

}  // namespace

struct f4f_schema {
    f4f::FeatureSchema value;
};
struct f4f_dataset {
    f4f::EncodedDataset value;
};
struct f4f_teacher {
    f4f::Teacher value;
};
struct f4f_student {
    f4f::Student value;
};

extern "C" {

const char* f4f_version(void) { return "0.1.0"; }

const char* f4f_last_error(void) { return g_last_error.c_str(); }

void f4f_string_free(char* s) { std::free(s); }

f4f_status f4f_schema_load(const char* path, f4f_schema** out) {
    return guarded([&] {
        require_arg(path, "path");
        require_arg(out, "out");
        *out = new f4f_schema{f4f::FeatureSchema::load(path)};
    });
}

void f4f_schema_free(f4f_schema* schema) { delete schema; }

f4f_status f4f_prepare(const f4f_schema* schema, const char* csv_path,
                       double test_fraction, uint64_t seed, f4f_dataset** train_out,
                       f4f_dataset** test_out, char** info_json) {
    return guarded([&] {
        require_arg(schema, "schema");
        require_arg(csv_path, "csv_path");
        require_arg(train_out, "train_out");
        require_arg(test_out, "test_out");
        f4f::RawTable table = f4f::load_csv(csv_path, schema->value);
        f4f::EncodedDataset full = f4f::encode(table);
        auto [train, test] = f4f::split(full, test_fraction, seed);
        if (info_json) {
            f4f::json info;
            info["rows_total"] = full.rows();
            info["rows_train"] = train.rows();
            info["rows_test"] = test.rows();
            info["dropped_missing"] = table.dropped_missing;
            info["feature_dim"] = train.feature_dim();
            *info_json = dup_string(info.dump());
        }
        *train_out = new f4f_dataset{std::move(train)};
        *test_out = new f4f_dataset{std::move(test)};
    });
}

f4f_status f4f_dataset_save(const f4f_dataset* ds, const char* path) {
    return guarded([&] {
        require_arg(ds, "ds");
        require_arg(path, "path");
        ds->value.save(path);
    });
}

f4f_status f4f_dataset_load(const char* path, f4f_dataset** out) {
    return guarded([&] {
        require_arg(path, "path");
        require_arg(out, "out");
        *out = new f4f_dataset{f4f::EncodedDataset::load(path)};
    });
}

int64_t f4f_dataset_rows(const f4f_dataset* ds) {
    return ds ? static_cast<int64_t>(ds->value.rows()) : -1;
}

int64_t f4f_dataset_feature_dim(const f4f_dataset* ds) {
    return ds ? static_cast<int64_t>(ds->value.feature_dim()) : -1;
}

void f4f_dataset_free(f4f_dataset* ds) { delete ds; }

f4f_status f4f_teacher_train(const f4f_dataset* train, const char* config_json,
                             f4f_teacher** out, char** trace_json) {
    return guarded([&] {
        require_arg(train, "train");
        require_arg(out, "out");
        ConfigReader cfg_in(config_json);
        f4f::TeacherTrainConfig cfg;
        cfg.beta = cfg_in.get<int>("beta", cfg.beta);
        cfg.epochs = cfg_in.get<std::size_t>("epochs", cfg.epochs);
        cfg.batch_size = cfg_in.get<std::size_t>("batch_size", cfg.batch_size);
        cfg.adam.learning_rate = cfg_in.get<double>("learning_rate", cfg.adam.learning_rate);
        cfg.seed = cfg_in.get<std::uint64_t>("seed", cfg.seed);
        cfg.latent_dim = cfg_in.get<std::size_t>("latent_dim", cfg.latent_dim);
        cfg.hidden_dim = cfg_in.get<std::size_t>("hidden_dim", cfg.hidden_dim);
        cfg_in.finish();
        std::vector<f4f::TeacherEpochTrace> trace;
        f4f::Teacher teacher = f4f::train_teacher(train->value, cfg, &trace);
        if (trace_json) *trace_json = dup_string(trace_to_json(trace).dump());
        *out = new f4f_teacher{std::move(teacher)};
    });
}

f4f_status f4f_teacher_save(const f4f_teacher* teacher, const char* path) {
    return guarded([&] {
        require_arg(teacher, "teacher");
        require_arg(path, "path");
        teacher->value.save(path);
    });
}

f4f_status f4f_teacher_load(const char* path, f4f_teacher** out) {
    return guarded([&] {
        require_arg(path, "path");
        require_arg(out, "out");
        *out = new f4f_teacher{f4f::Teacher::load(path)};
    });
}

f4f_status f4f_teacher_latent_dcor(const f4f_teacher* teacher, const f4f_dataset* ds,
                                   double* out) {
    return guarded([&] {
        require_arg(teacher, "teacher");
        require_arg(ds, "ds");
        require_arg(out, "out");
        *out = f4f::teacher_latent_dcor(teacher->value, ds->value);
    });
}

void f4f_teacher_free(f4f_teacher* teacher) { delete teacher; }

f4f_status f4f_student_distill(const f4f_teacher* teacher, const f4f_dataset* train,
                               const char* config_json, f4f_student** out,
                               char** trace_json) {
    return guarded([&] {
        require_arg(teacher, "teacher");
        require_arg(train, "train");
        require_arg(out, "out");
        ConfigReader cfg_in(config_json);
        f4f::DistillConfig cfg;
        cfg.epochs = cfg_in.get<std::size_t>("epochs", cfg.epochs);
        cfg.batch_size = cfg_in.get<std::size_t>("batch_size", cfg.batch_size);
        cfg.adam.learning_rate = cfg_in.get<double>("learning_rate", cfg.adam.learning_rate);
        cfg.pairing = f4f::pairing_from_name(
            cfg_in.get<std::string>("pairing", f4f::pairing_name(cfg.pairing)));
        cfg.seed = cfg_in.get<std::uint64_t>("seed", cfg.seed);
        cfg.use_mu_targets = cfg_in.get<bool>("use_mu_targets", cfg.use_mu_targets);
        cfg_in.finish();
        std::vector<f4f::DistillEpochTrace> trace;
        f4f::Student student = f4f::train_student(teacher->value, train->value, cfg, &trace);
        if (trace_json) *trace_json = dup_string(trace_to_json(trace).dump());
        *out = new f4f_student{std::move(student)};
    });
}

f4f_status f4f_student_save(const f4f_student* student, const char* path) {
    return guarded([&] {
        require_arg(student, "student");
        require_arg(path, "path");
        student->value.save(path);
    });
}

f4f_status f4f_student_load(const char* path, f4f_student** out) {
    return guarded([&] {
        require_arg(path, "path");
        require_arg(out, "out");
        *out = new f4f_student{f4f::Student::load(path)};
    });
}

void f4f_student_free(f4f_student* student) { delete student; }

f4f_status f4f_generate(const f4f_teacher* teacher, const f4f_student* student,
                        const f4f_dataset* train, const char* config_json,
                        const char* csv_path, const char* provenance_path) {
    return guarded([&] {
        require_arg(teacher, "teacher");
        require_arg(student, "student");
        require_arg(train, "train");
        require_arg(csv_path, "csv_path");
        require_arg(provenance_path, "provenance_path");
        ConfigReader cfg_in(config_json);
        f4f::GenerateConfig cfg;
        cfg.n_samples = cfg_in.get<std::size_t>("n_samples", train->value.rows());
        cfg.seed = cfg_in.get<std::uint64_t>("seed", cfg.seed);
        cfg.strategy = f4f::sensitive_strategy_from_name(
            cfg_in.get<std::string>("s_strategy", f4f::sensitive_strategy_name(cfg.strategy)));
        cfg.fixed_level = cfg_in.get<std::string>("s_fixed_level", cfg.fixed_level);
        cfg_in.finish();
        f4f::SyntheticDataset synth =
            f4f::generate(student->value, teacher->value, train->value.schema,
                          train->value.transforms, train->value.s_marginal(), cfg);
        f4f::write_synthetic_csv(synth, csv_path);
        f4f::write_json_file(synth.provenance, provenance_path);
    });
}

namespace {

f4f::EvalConfig parse_eval_config(const char* config_json) {
    ConfigReader cfg_in(config_json);
    f4f::EvalConfig cfg;
    cfg.forest.n_trees = cfg_in.get<std::size_t>("n_trees", cfg.forest.n_trees);
    cfg.forest.max_depth = cfg_in.get<std::size_t>("max_depth", cfg.forest.max_depth);
    cfg.forest.features_per_split =
        cfg_in.get<std::size_t>("features_per_split", cfg.forest.features_per_split);
    cfg.forest.seed = cfg_in.get<std::uint64_t>("seed", cfg.forest.seed);
    cfg.knn_k = cfg_in.get<std::size_t>("knn_k", cfg.knn_k);
    cfg_in.finish();
    return cfg;
}

}  // namespace

f4f_status f4f_evaluate(const f4f_dataset* real_test, const char* synthetic_csv,
                        const char* config_json, char** report_json) {
    return guarded([&] {
        require_arg(real_test, "real_test");
        require_arg(synthetic_csv, "synthetic_csv");
        require_arg(report_json, "report_json");
        f4f::EvalConfig cfg = parse_eval_config(config_json);
        f4f::RawTable table = f4f::load_csv(synthetic_csv, real_test->value.schema);
        f4f::SyntheticDataset synth;
        synth.schema = real_test->value.schema;
        synth.records = std::move(table.rows);
        synth.provenance["format"] = "fair4free-synthetic/1";
        synth.provenance["source_csv"] = synthetic_csv;
        f4f::EvalReport report = f4f::evaluate_synthetic(real_test->value, synth, cfg);
        *report_json = dup_string(report.to_json().dump());
    });
}

f4f_status f4f_evaluate_baseline(const f4f_dataset* real_train,
                                 const f4f_dataset* real_test, const char* config_json,
                                 char** report_json) {
    return guarded([&] {
        require_arg(real_train, "real_train");
        require_arg(real_test, "real_test");
        require_arg(report_json, "report_json");
        f4f::EvalConfig cfg = parse_eval_config(config_json);
        f4f::EvalReport report =
            f4f::evaluate_real_baseline(real_train->value, real_test->value, cfg);
        *report_json = dup_string(report.to_json().dump());
    });
}

f4f_status f4f_pca_overlap(const f4f_teacher* teacher, const f4f_student* student,
                           const f4f_dataset* ds, const char* config_json,
                           const char* csv_path, const char* svg_path_or_null,
                           char** summary_json) {
    return guarded([&] {
        require_arg(teacher, "teacher");
        require_arg(student, "student");
        require_arg(ds, "ds");
        require_arg(csv_path, "csv_path");
        ConfigReader cfg_in(config_json);
        const auto points = cfg_in.get<std::size_t>("points", 2000);
        const auto seed = cfg_in.get<std::uint64_t>("seed", 0);
        cfg_in.finish();
        f4f::PcaOverlap overlap =
            f4f::pca_overlap(teacher->value, student->value, ds->value, points, seed);
        f4f::write_pca_csv(overlap, csv_path);
        if (svg_path_or_null) f4f::write_pca_svg(overlap, svg_path_or_null);
        if (summary_json) {
            f4f::json j;
            j["energy_distance"] = overlap.energy;
            j["teacher_mean"] = overlap.teacher_mean;
            j["teacher_std"] = overlap.teacher_std;
            j["student_mean"] = overlap.student_mean;
            j["student_std"] = overlap.student_std;
            j["points"] = points;
            *summary_json = dup_string(j.dump());
        }
    });
}

}  // extern "C"
