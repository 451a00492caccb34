/*
 * fair4free C API
 *
 * Shared-library interface to the fair synthetic-data pipeline: prepare a
 * tabular dataset, train the fairness-penalized VAE teacher, distill its
 * latent distribution into a small noise-fed student, generate synthetic
 * records and evaluate them.
 *
 * Conventions:
 *   - every function returns an f4f_status; 0 means success
 *   - on failure, f4f_last_error() returns a message for the calling thread
 *   - objects are opaque handles released with their matching *_free()
 *   - configs are JSON strings; unknown keys are rejected
 *   - strings returned through char** are released with f4f_string_free()
 */

#ifndef FAIR4FREE_H
#define FAIR4FREE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t f4f_status;
#define F4F_OK 0
#define F4F_ERROR_VALIDATION 1 /* bad inputs: files, schemas, shapes, configs */
#define F4F_ERROR_RUNTIME 2    /* training divergence or internal failure */

typedef struct f4f_schema f4f_schema;
typedef struct f4f_dataset f4f_dataset; /* one encoded split + its transforms */
typedef struct f4f_teacher f4f_teacher;
typedef struct f4f_student f4f_student;

const char* f4f_version(void);
/* message of the last failure on this thread; empty string if none */
const char* f4f_last_error(void);
void f4f_string_free(char* s);

/* ---- schema ---- */
f4f_status f4f_schema_load(const char* path, f4f_schema** out);
void f4f_schema_free(f4f_schema* schema);

/* ---- dataset preparation ----
 * Loads the CSV, encodes it (one-hot categoricals, z-scored numerics),
 * splits deterministically and re-standardizes with train-split statistics.
 * info_json (optional) receives row counts and the number of rows dropped
 * for missing values. */
f4f_status f4f_prepare(const f4f_schema* schema, const char* csv_path,
                       double test_fraction, uint64_t seed, f4f_dataset** train_out,
                       f4f_dataset** test_out, char** info_json);
f4f_status f4f_dataset_save(const f4f_dataset* ds, const char* path);
f4f_status f4f_dataset_load(const char* path, f4f_dataset** out);
int64_t f4f_dataset_rows(const f4f_dataset* ds);
int64_t f4f_dataset_feature_dim(const f4f_dataset* ds);
void f4f_dataset_free(f4f_dataset* ds);

/* ---- stage 1: teacher ----
 * config keys (all optional): beta (int 0..9, default 9), epochs,
 * batch_size, learning_rate, seed, latent_dim, hidden_dim.
 * trace_json (optional) receives the per-epoch loss trace. */
f4f_status f4f_teacher_train(const f4f_dataset* train, const char* config_json,
                             f4f_teacher** out, char** trace_json);
f4f_status f4f_teacher_save(const f4f_teacher* teacher, const char* path);
f4f_status f4f_teacher_load(const char* path, f4f_teacher** out);
/* distance correlation between encoder means and the sensitive attribute */
f4f_status f4f_teacher_latent_dcor(const f4f_teacher* teacher, const f4f_dataset* ds,
                                   double* out);
void f4f_teacher_free(f4f_teacher* teacher);

/* ---- stage 2: data-free distillation ----
 * config keys: epochs (default 5000), batch_size (2048), learning_rate
 * (1e-5), pairing ("direct" | "sorted"), seed, use_mu_targets. */
f4f_status f4f_student_distill(const f4f_teacher* teacher, const f4f_dataset* train,
                               const char* config_json, f4f_student** out,
                               char** trace_json);
f4f_status f4f_student_save(const f4f_student* student, const char* path);
f4f_status f4f_student_load(const char* path, f4f_student** out);
void f4f_student_free(f4f_student* student);

/* ---- stage 3: generation ----
 * config keys: n_samples (default: train rows), seed, s_strategy
 * ("empirical" | "fixed"), s_fixed_level. Writes the synthetic CSV and a
 * provenance sidecar. The train dataset supplies the encoding state and the
 * sensitive marginal. */
f4f_status f4f_generate(const f4f_teacher* teacher, const f4f_student* student,
                        const f4f_dataset* train, const char* config_json,
                        const char* csv_path, const char* provenance_path);

/* ---- evaluation ----
 * config keys: n_trees (100), max_depth (12), features_per_split (0 = sqrt),
 * seed, knn_k (5). Trains the forest on the synthetic CSV, tests on the real
 * split, reports DPR/EOR, accuracy/recall/F1, density/coverage and
 * per-column feature importances as JSON. */
f4f_status f4f_evaluate(const f4f_dataset* real_test, const char* synthetic_csv,
                        const char* config_json, char** report_json);
/* same protocol trained on the real train split (no synthetic-quality part) */
f4f_status f4f_evaluate_baseline(const f4f_dataset* real_train,
                                 const f4f_dataset* real_test, const char* config_json,
                                 char** report_json);

/* ---- latent-overlap diagnostics ----
 * config keys: points (2000), seed. Projects teacher latents and student
 * samples onto shared principal components; writes a CSV (set,dim1,dim2),
 * optionally an SVG scatter, and returns moments + energy distance as JSON. */
f4f_status f4f_pca_overlap(const f4f_teacher* teacher, const f4f_student* student,
                           const f4f_dataset* ds, const char* config_json,
                           const char* csv_path, const char* svg_path_or_null,
                           char** summary_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FAIR4FREE_H */
