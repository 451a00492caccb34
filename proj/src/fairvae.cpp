#include "fairvae.hpp"

#include <cmath>

#include "dcov.hpp"
#include "error.hpp"

namespace f4f {

void TeacherTrainConfig::validate() const {
    if (beta < 0 || beta > 9)
        throw ValidationError("teacher config: beta must be an integer in {0..9}, got " +
                              std::to_string(beta));
    if (epochs < 1) throw ValidationError("teacher config: epochs must be >= 1");
    if (batch_size < 1) throw ValidationError("teacher config: batch_size must be >= 1");
    if (latent_dim < 1 || hidden_dim < 1)
        throw ValidationError("teacher config: latent_dim and hidden_dim must be >= 1");
    if (!(adam.learning_rate > 0.0))
        throw ValidationError("teacher config: learning_rate must be positive");
}

Teacher::Teacher(std::size_t input_dim, std::size_t n_groups, std::size_t hidden_dim,
                 std::size_t latent_dim, std::uint64_t schema_hash, Rng& init_rng)
    : input_dim_(input_dim),
      n_groups_(n_groups),
      hidden_dim_(hidden_dim),
      latent_dim_(latent_dim),
      schema_hash_(schema_hash),
      enc_w1_(input_dim + n_groups, hidden_dim),
      enc_b1_(1, hidden_dim),
      enc_w2_(hidden_dim, 2 * latent_dim),
      enc_b2_(1, 2 * latent_dim),
      dec_w1_(latent_dim + n_groups, hidden_dim),
      dec_b1_(1, hidden_dim),
      dec_w2_(hidden_dim, input_dim),
      dec_b2_(1, input_dim) {
    init_kaiming_uniform(enc_w1_, input_dim + n_groups, init_rng);
    init_kaiming_uniform(enc_w2_, hidden_dim, init_rng);
    init_kaiming_uniform(dec_w1_, latent_dim + n_groups, init_rng);
    init_kaiming_uniform(dec_w2_, hidden_dim, init_rng);
}

std::size_t Teacher::encoder_parameter_count() const {
    return enc_w1_.value.size() + enc_b1_.value.size() + enc_w2_.value.size() +
           enc_b2_.value.size();
}

GaussianLatent Teacher::encode(const Matrix& x, const Matrix& s_onehot) const {
    if (x.cols() != input_dim_)
        throw DimensionError("teacher encode: input width " + shape_string(x) +
                             ", expected " + std::to_string(input_dim_) + " columns");
    if (s_onehot.cols() != n_groups_ || s_onehot.rows() != x.rows())
        throw DimensionError("teacher encode: sensitive one-hot is " +
                             shape_string(s_onehot) + ", expected " +
                             std::to_string(x.rows()) + "x" + std::to_string(n_groups_));
    Matrix h = relu(affine_forward(hconcat(x, s_onehot), enc_w1_, enc_b1_));
    Matrix lat = affine_forward(h, enc_w2_, enc_b2_);
    GaussianLatent out;
    out.mu = slice_cols(lat, 0, latent_dim_);
    out.logvar = slice_cols(lat, latent_dim_, latent_dim_);
    return out;
}

Matrix Teacher::decode(const Matrix& z, const Matrix& s_onehot) const {
    if (z.cols() != latent_dim_)
        throw DimensionError("teacher decode: latent width " + shape_string(z) +
                             ", expected " + std::to_string(latent_dim_) + " columns");
    if (s_onehot.cols() != n_groups_ || s_onehot.rows() != z.rows())
        throw DimensionError("teacher decode: sensitive one-hot is " +
                             shape_string(s_onehot) + ", expected " +
                             std::to_string(z.rows()) + "x" + std::to_string(n_groups_));
    Matrix h = relu(affine_forward(hconcat(z, s_onehot), dec_w1_, dec_b1_));
    return affine_forward(h, dec_w2_, dec_b2_);
}

std::vector<ParamTensor*> Teacher::parameters() {
    return {&enc_w1_, &enc_b1_, &enc_w2_, &enc_b2_,
            &dec_w1_, &dec_b1_, &dec_w2_, &dec_b2_};
}

std::vector<const ParamTensor*> Teacher::parameters() const {
    return {&enc_w1_, &enc_b1_, &enc_w2_, &enc_b2_,
            &dec_w1_, &dec_b1_, &dec_w2_, &dec_b2_};
}

Matrix reparameterize(const GaussianLatent& lat, const Matrix& eps) {
    require_same_shape(lat.mu, lat.logvar, "reparameterize");
    require_same_shape(lat.mu, eps, "reparameterize");
    Matrix z = lat.mu;
    for (std::size_t i = 0; i < z.size(); ++i)
        z.values()[i] += std::exp(0.5 * lat.logvar.values()[i]) * eps.values()[i];
    return z;
}

double reconstruction_loss(const Matrix& outputs, const Matrix& targets,
                           const FeatureLayout& layout) {
    require_same_shape(outputs, targets, "reconstruction_loss");
    if (outputs.cols() != layout.total_width)
        throw DimensionError("reconstruction_loss: width " + std::to_string(outputs.cols()) +
                             " does not match layout width " +
                             std::to_string(layout.total_width));
    double loss = 0.0;
    for (std::size_t i = 0; i < outputs.rows(); ++i) {
        const double* oi = outputs.row_ptr(i);
        const double* ti = targets.row_ptr(i);
        for (const LayoutEntry& e : layout.entries) {
            if (e.width == 1) {  // numeric
                const double d = oi[e.offset] - ti[e.offset];
                loss += 0.5 * d * d;
            } else {  // softmax cross-entropy against the one-hot target
                double mx = oi[e.offset];
                for (std::size_t j = 1; j < e.width; ++j)
                    mx = std::max(mx, oi[e.offset + j]);
                double lse = 0.0;
                double picked = 0.0;
                for (std::size_t j = 0; j < e.width; ++j) {
                    lse += std::exp(oi[e.offset + j] - mx);
                    picked += ti[e.offset + j] * oi[e.offset + j];
                }
                loss += mx + std::log(lse) - picked;
            }
        }
    }
    return loss;
}

Matrix reconstruction_loss_backward(const Matrix& outputs, const Matrix& targets,
                                    const FeatureLayout& layout, double scale) {
    require_same_shape(outputs, targets, "reconstruction_loss_backward");
    Matrix grad(outputs.rows(), outputs.cols());
    for (std::size_t i = 0; i < outputs.rows(); ++i) {
        const double* oi = outputs.row_ptr(i);
        const double* ti = targets.row_ptr(i);
        double* gi = grad.row_ptr(i);
        for (const LayoutEntry& e : layout.entries) {
            if (e.width == 1) {
                gi[e.offset] = scale * (oi[e.offset] - ti[e.offset]);
            } else {
                double mx = oi[e.offset];
                for (std::size_t j = 1; j < e.width; ++j)
                    mx = std::max(mx, oi[e.offset + j]);
                double lse = 0.0;
                for (std::size_t j = 0; j < e.width; ++j)
                    lse += std::exp(oi[e.offset + j] - mx);
                for (std::size_t j = 0; j < e.width; ++j) {
                    const double softmax = std::exp(oi[e.offset + j] - mx) / lse;
                    gi[e.offset + j] = scale * (softmax - ti[e.offset + j]);
                }
            }
        }
    }
    return grad;
}

namespace {

// One batch forward (and optionally backward) pass with all intermediate
// activations held locally. Gradients accumulate into the ParamTensors.
TeacherBatchLoss teacher_batch_pass(Teacher& t, const Matrix& x, const Matrix& s_onehot,
                                    const FeatureLayout& layout, int beta,
                                    const Matrix& eps, bool with_grads) {
    auto params = t.parameters();
    ParamTensor& enc_w1 = *params[0];
    ParamTensor& enc_b1 = *params[1];
    ParamTensor& enc_w2 = *params[2];
    ParamTensor& enc_b2 = *params[3];
    ParamTensor& dec_w1 = *params[4];
    ParamTensor& dec_b1 = *params[5];
    ParamTensor& dec_w2 = *params[6];
    ParamTensor& dec_b2 = *params[7];

    const std::size_t batch = x.rows();
    const std::size_t k = t.latent_dim();
    require_shape(eps, batch, k, "teacher_batch_pass eps");
    const double inv_b = 1.0 / static_cast<double>(batch);

    const Matrix enc_in = hconcat(x, s_onehot);
    const Matrix h1_pre = affine_forward(enc_in, enc_w1, enc_b1);
    const Matrix h1 = relu(h1_pre);
    const Matrix lat = affine_forward(h1, enc_w2, enc_b2);
    GaussianLatent g{slice_cols(lat, 0, k), slice_cols(lat, k, k)};
    const Matrix z = reparameterize(g, eps);
    const Matrix dec_in = hconcat(z, s_onehot);
    const Matrix h2_pre = affine_forward(dec_in, dec_w1, dec_b1);
    const Matrix h2 = relu(h2_pre);
    const Matrix out = affine_forward(h2, dec_w2, dec_b2);

    TeacherBatchLoss loss;
    loss.kl = gaussian_kl(g.mu, g.logvar) * inv_b;
    loss.nll = reconstruction_loss(out, x, layout) * inv_b;
    Dcov2Result pen;
    // the estimator needs >= 4 rows; a smaller trailing batch skips the penalty
    const bool with_penalty = beta > 0 && batch >= 4;
    if (with_penalty) pen = dcov2_empirical(z, s_onehot);
    loss.v2 = pen.value;
    loss.total = loss.kl + loss.nll + static_cast<double>(beta) * loss.v2;
    if (!with_grads) return loss;

    Matrix dout = reconstruction_loss_backward(out, x, layout, inv_b);
    AffineGrads g4 = affine_backward(dout, h2, dec_w2.value);
    add_in_place(dec_w2.grad, g4.dw);
    add_in_place(dec_b2.grad, g4.db);
    Matrix dh2_pre = relu_backward(g4.dx, h2_pre);
    AffineGrads g3 = affine_backward(dh2_pre, dec_in, dec_w1.value);
    add_in_place(dec_w1.grad, g3.dw);
    add_in_place(dec_b1.grad, g3.db);

    Matrix dz = slice_cols(g3.dx, 0, k);
    if (with_penalty) {
        for (std::size_t i = 0; i < dz.size(); ++i)
            dz.values()[i] += static_cast<double>(beta) * pen.grad_z.values()[i];
    }

    Matrix dmu = dz;
    Matrix dlogvar(batch, k);
    for (std::size_t i = 0; i < dlogvar.size(); ++i)
        dlogvar.values()[i] =
            dz.values()[i] * eps.values()[i] * 0.5 * std::exp(0.5 * g.logvar.values()[i]);
    gaussian_kl_backward(g.mu, g.logvar, inv_b, dmu, dlogvar);

    AffineGrads g2 = affine_backward(hconcat(dmu, dlogvar), h1, enc_w2.value);
    add_in_place(enc_w2.grad, g2.dw);
    add_in_place(enc_b2.grad, g2.db);
    Matrix dh1_pre = relu_backward(g2.dx, h1_pre);
    AffineGrads g1 = affine_backward(dh1_pre, enc_in, enc_w1.value);
    add_in_place(enc_w1.grad, g1.dw);
    add_in_place(enc_b1.grad, g1.db);
    return loss;
}

Matrix onehot_int(const std::vector<int>& values, std::size_t width) {
    Matrix m(values.size(), width);
    for (std::size_t i = 0; i < values.size(); ++i)
        m(i, static_cast<std::size_t>(values[i])) = 1.0;
    return m;
}

}  // namespace

TeacherBatchLoss teacher_batch_loss(const Teacher& t, const Matrix& x, const Matrix& s_onehot,
                                    const FeatureLayout& layout, int beta, const Matrix& eps) {
    // forward-only pass; const_cast is safe because with_grads=false never writes
    return teacher_batch_pass(const_cast<Teacher&>(t), x, s_onehot, layout, beta, eps, false);
}

TeacherBatchLoss teacher_accumulate_gradients(Teacher& t, const Matrix& x,
                                              const Matrix& s_onehot,
                                              const FeatureLayout& layout, int beta,
                                              const Matrix& eps) {
    return teacher_batch_pass(t, x, s_onehot, layout, beta, eps, true);
}

Teacher train_teacher(const EncodedDataset& ds, const TeacherTrainConfig& cfg,
                      std::vector<TeacherEpochTrace>* trace) {
    cfg.validate();
    if (ds.rows() == 0) throw ValidationError("train_teacher: dataset is empty");
    const FeatureLayout layout = FeatureLayout::features_with_target(ds.schema);

    Rng init_rng(mix_seed(cfg.seed, 0x7e5cULL));
    Teacher t(layout.total_width, ds.schema.sensitive_levels(), cfg.hidden_dim,
              cfg.latent_dim, ds.schema.hash(), init_rng);
    auto params = t.parameters();
    const double n = static_cast<double>(ds.rows());

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double kl_sum = 0.0, nll_sum = 0.0, v2_sum = 0.0;
        const auto epoch_batches =
            batches(ds, cfg.batch_size, mix_seed(cfg.seed, 0xba7c0000ULL + epoch));
        for (std::size_t bi = 0; bi < epoch_batches.size(); ++bi) {
            const Batch& b = epoch_batches[bi];
            const Matrix x_vae = hconcat(b.x, onehot_int(b.y, 2));
            const Matrix eps = sample_standard_normal(
                b.size(), cfg.latent_dim,
                mix_seed(cfg.seed, 0xe9500000ULL + epoch * 1000003ULL + bi));
            for (ParamTensor* p : params) p->zero_grad();
            TeacherBatchLoss loss =
                teacher_accumulate_gradients(t, x_vae, b.s_onehot, layout, cfg.beta, eps);
            if (!std::isfinite(loss.total))
                throw TrainingDivergedError("teacher training diverged at epoch " +
                                            std::to_string(epoch) + ", batch " +
                                            std::to_string(bi + 1));
            for (ParamTensor* p : params) adam_step(*p, cfg.adam);
            const double w = static_cast<double>(b.size());
            kl_sum += loss.kl * w;
            nll_sum += loss.nll * w;
            v2_sum += loss.v2 * w;
        }
        if (trace) {
            TeacherEpochTrace e;
            e.epoch = epoch;
            e.kl = kl_sum / n;
            e.nll = nll_sum / n;
            e.v2 = v2_sum / n;  // 0 when beta == 0 (penalty not evaluated)
            e.total = e.kl + e.nll + static_cast<double>(cfg.beta) * e.v2;
            trace->push_back(e);
        }
    }
    return t;
}

Matrix teacher_latent_mu(const Teacher& t, const EncodedDataset& ds) {
    return t.encode(ds.vae_input(), ds.s_onehot).mu;
}

double teacher_latent_dcor(const Teacher& t, const EncodedDataset& ds) {
    return dcor(teacher_latent_mu(t, ds), ds.s_onehot);
}

json Teacher::to_json() const {
    json j;
    j["format"] = "fair4free-teacher/1";
    j["schema_hash"] = hash_hex(schema_hash_);
    j["input_dim"] = input_dim_;
    j["n_groups"] = n_groups_;
    j["k"] = latent_dim_;
    j["h"] = hidden_dim_;
    json w;
    const char* names[] = {"enc_w1", "enc_b1", "enc_w2", "enc_b2",
                           "dec_w1", "dec_b1", "dec_w2", "dec_b2"};
    auto params = parameters();
    for (std::size_t i = 0; i < params.size(); ++i)
        w[names[i]] = matrix_to_json(params[i]->value);
    j["weights"] = w;
    return j;
}

Teacher Teacher::from_json(const json& j) {
    if (!j.contains("format") || j.at("format") != "fair4free-teacher/1")
        throw ValidationError("teacher artifact: unsupported or missing format tag");
    Teacher t;
    t.schema_hash_ = std::stoull(j.at("schema_hash").get<std::string>(), nullptr, 16);
    t.input_dim_ = j.at("input_dim").get<std::size_t>();
    t.n_groups_ = j.at("n_groups").get<std::size_t>();
    t.latent_dim_ = j.at("k").get<std::size_t>();
    t.hidden_dim_ = j.at("h").get<std::size_t>();
    const json& w = j.at("weights");
    const char* names[] = {"enc_w1", "enc_b1", "enc_w2", "enc_b2",
                           "dec_w1", "dec_b1", "dec_w2", "dec_b2"};
    std::vector<ParamTensor*> params = t.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
        Matrix value = matrix_from_json(w.at(names[i]), "teacher weights");
        *params[i] = ParamTensor(value.rows(), value.cols());
        params[i]->value = std::move(value);
    }
    // shape consistency
    require_shape(t.enc_w1_.value, t.input_dim_ + t.n_groups_, t.hidden_dim_, "teacher enc_w1");
    require_shape(t.enc_w2_.value, t.hidden_dim_, 2 * t.latent_dim_, "teacher enc_w2");
    require_shape(t.dec_w1_.value, t.latent_dim_ + t.n_groups_, t.hidden_dim_, "teacher dec_w1");
    require_shape(t.dec_w2_.value, t.hidden_dim_, t.input_dim_, "teacher dec_w2");
    return t;
}

void Teacher::save(const std::string& path) const { write_json_file(to_json(), path); }

Teacher Teacher::load(const std::string& path) { return from_json(read_json_file(path)); }

}  // namespace f4f
