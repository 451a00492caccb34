#include "distill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace f4f {

const char* pairing_name(Pairing p) { return p == Pairing::direct ? "direct" : "sorted"; }

Pairing pairing_from_name(const std::string& name) {
    if (name == "direct") return Pairing::direct;
    if (name == "sorted") return Pairing::sorted;
    throw ValidationError("pairing must be \"direct\" or \"sorted\", got \"" + name + "\"");
}

void DistillConfig::validate() const {
    if (epochs < 1) throw ValidationError("distill config: epochs must be >= 1");
    if (batch_size < 1) throw ValidationError("distill config: batch_size must be >= 1");
    if (noise_dim < 1 || hidden_dim < 1)
        throw ValidationError("distill config: noise_dim and hidden_dim must be >= 1");
    if (!(adam.learning_rate > 0.0))
        throw ValidationError("distill config: learning_rate must be positive");
}

Student::Student(std::size_t noise_dim, std::size_t hidden_dim, std::size_t latent_dim,
                 std::uint64_t schema_hash, Rng& init_rng)
    : noise_dim_(noise_dim),
      hidden_dim_(hidden_dim),
      latent_dim_(latent_dim),
      schema_hash_(schema_hash),
      w1_(noise_dim, hidden_dim),
      b1_(1, hidden_dim),
      w2_(hidden_dim, 2 * latent_dim),
      b2_(1, 2 * latent_dim) {
    init_kaiming_uniform(w1_, noise_dim, init_rng);
    init_kaiming_uniform(w2_, hidden_dim, init_rng);
}

std::size_t Student::parameter_count() const {
    return w1_.value.size() + b1_.value.size() + w2_.value.size() + b2_.value.size();
}

StudentForward Student::forward(const Matrix& noise, const Matrix& eps) const {
    if (noise.cols() != noise_dim_)
        throw DimensionError("student forward: noise width " + shape_string(noise) +
                             ", expected " + std::to_string(noise_dim_) + " columns");
    Matrix h = relu(affine_forward(noise, w1_, b1_));
    Matrix lat = affine_forward(h, w2_, b2_);
    StudentForward out;
    out.latent.mu = slice_cols(lat, 0, latent_dim_);
    out.latent.logvar = slice_cols(lat, latent_dim_, latent_dim_);
    out.z = reparameterize(out.latent, eps);
    return out;
}

std::vector<ParamTensor*> Student::parameters() { return {&w1_, &b1_, &w2_, &b2_}; }

std::vector<const ParamTensor*> Student::parameters() const {
    return {&w1_, &b1_, &w2_, &b2_};
}

namespace {

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// ranks of column c of m in ascending value order
std::vector<std::size_t> column_order(const Matrix& m, std::size_t c) {
    std::vector<std::size_t> idx(m.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return m(a, c) < m(b, c);
    });
    return idx;
}

}  // namespace

DistillLossParts distill_loss(const Matrix& z, const Matrix& z_prime,
                              const GaussianLatent& lat_prime, Pairing pairing) {
    require_same_shape(z, z_prime, "distill_loss");
    const std::size_t batch = z.rows();
    const std::size_t k = z.cols();
    const double inv_b = 1.0 / static_cast<double>(batch);

    DistillLossParts parts;
    if (pairing == Pairing::direct || batch == 1) {
        // a single row degenerates sorted pairing to direct
        for (std::size_t i = 0; i < z.size(); ++i)
            parts.distill += std::abs(z.values()[i] - z_prime.values()[i]);
    } else {
        for (std::size_t c = 0; c < k; ++c) {
            const auto oz = column_order(z, c);
            const auto op = column_order(z_prime, c);
            for (std::size_t r = 0; r < batch; ++r)
                parts.distill += std::abs(z(oz[r], c) - z_prime(op[r], c));
        }
    }
    parts.distill *= inv_b;
    parts.kl = gaussian_kl(lat_prime.mu, lat_prime.logvar) * inv_b;
    parts.total = parts.distill + parts.kl;
    return parts;
}

namespace {

// d(distill term)/d(z'), matching distill_loss
Matrix distill_loss_backward_zprime(const Matrix& z, const Matrix& z_prime, Pairing pairing) {
    const std::size_t batch = z.rows();
    const std::size_t k = z.cols();
    const double inv_b = 1.0 / static_cast<double>(batch);
    Matrix grad(batch, k);
    if (pairing == Pairing::direct || batch == 1) {
        for (std::size_t i = 0; i < grad.size(); ++i)
            grad.values()[i] = inv_b * sign_of(z_prime.values()[i] - z.values()[i]);
    } else {
        for (std::size_t c = 0; c < k; ++c) {
            const auto oz = column_order(z, c);
            const auto op = column_order(z_prime, c);
            for (std::size_t r = 0; r < batch; ++r)
                grad(op[r], c) = inv_b * sign_of(z_prime(op[r], c) - z(oz[r], c));
        }
    }
    return grad;
}

}  // namespace

Student train_student_with_targets(const LatentTargetFn& targets, const EncodedDataset& ds,
                                   std::size_t latent_dim, std::uint64_t schema_hash,
                                   const DistillConfig& cfg,
                                   std::vector<DistillEpochTrace>* trace) {
    cfg.validate();
    if (ds.rows() == 0) throw ValidationError("train_student: dataset is empty");

    Rng init_rng(mix_seed(cfg.seed, 0x57edULL));
    Student student(cfg.noise_dim, cfg.hidden_dim, latent_dim, schema_hash, init_rng);
    auto params = student.parameters();
    ParamTensor& w1 = *params[0];
    ParamTensor& b1 = *params[1];
    ParamTensor& w2 = *params[2];
    ParamTensor& b2 = *params[3];
    const double n = static_cast<double>(ds.rows());

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        double distill_sum = 0.0, kl_sum = 0.0;
        const auto epoch_batches =
            batches(ds, cfg.batch_size, mix_seed(cfg.seed, 0xd15b0000ULL + epoch));
        for (std::size_t bi = 0; bi < epoch_batches.size(); ++bi) {
            const Batch& b = epoch_batches[bi];
            const std::size_t bs = b.size();
            const std::uint64_t stream = epoch * 1000003ULL + bi;

            const Matrix z_target = targets(b, epoch, bi);
            require_shape(z_target, bs, latent_dim, "distill targets");

            // the student consumes noise only; batch contents stop at the target fn
            const Matrix noise = sample_standard_normal(
                bs, cfg.noise_dim, mix_seed(cfg.seed, 0x401e0000ULL + stream));
            const Matrix eps = sample_standard_normal(
                bs, latent_dim, mix_seed(cfg.seed, 0x39eb0000ULL + stream));

            const Matrix h_pre = affine_forward(noise, w1, b1);
            const Matrix h = relu(h_pre);
            const Matrix lat = affine_forward(h, w2, b2);
            GaussianLatent g{slice_cols(lat, 0, latent_dim), slice_cols(lat, latent_dim, latent_dim)};
            const Matrix z_prime = reparameterize(g, eps);

            DistillLossParts parts = distill_loss(z_target, z_prime, g, cfg.pairing);
            if (!std::isfinite(parts.total))
                throw TrainingDivergedError("distillation diverged at epoch " +
                                            std::to_string(epoch) + ", batch " +
                                            std::to_string(bi + 1));

            Matrix dz = distill_loss_backward_zprime(z_target, z_prime, cfg.pairing);
            Matrix dmu = dz;
            Matrix dlogvar(bs, latent_dim);
            for (std::size_t i = 0; i < dlogvar.size(); ++i)
                dlogvar.values()[i] = dz.values()[i] * eps.values()[i] * 0.5 *
                                      std::exp(0.5 * g.logvar.values()[i]);
            gaussian_kl_backward(g.mu, g.logvar, 1.0 / static_cast<double>(bs), dmu, dlogvar);

            for (ParamTensor* p : params) p->zero_grad();
            AffineGrads g2 = affine_backward(hconcat(dmu, dlogvar), h, w2.value);
            add_in_place(w2.grad, g2.dw);
            add_in_place(b2.grad, g2.db);
            Matrix dh_pre = relu_backward(g2.dx, h_pre);
            AffineGrads g1 = affine_backward(dh_pre, noise, w1.value);
            add_in_place(w1.grad, g1.dw);
            add_in_place(b1.grad, g1.db);
            for (ParamTensor* p : params) adam_step(*p, cfg.adam);

            distill_sum += parts.distill * static_cast<double>(bs);
            kl_sum += parts.kl * static_cast<double>(bs);
        }
        if (trace) {
            DistillEpochTrace e;
            e.epoch = epoch;
            e.distill = distill_sum / n;
            e.kl = kl_sum / n;
            e.total = e.distill + e.kl;
            trace->push_back(e);
        }
    }
    return student;
}

Student train_student(const Teacher& teacher, const EncodedDataset& ds,
                      const DistillConfig& cfg, std::vector<DistillEpochTrace>* trace) {
    const FeatureLayout layout = FeatureLayout::features_with_target(ds.schema);
    if (layout.total_width != teacher.input_dim())
        throw ValidationError("train_student: dataset encodes to width " +
                              std::to_string(layout.total_width) +
                              " but the teacher expects " +
                              std::to_string(teacher.input_dim()));
    if (ds.schema.hash() != teacher.schema_hash())
        throw ValidationError("train_student: dataset schema does not match the teacher's");

    LatentTargetFn targets = [&](const Batch& b, std::size_t epoch, std::size_t bi) {
        Matrix y1h(b.size(), 2);
        for (std::size_t i = 0; i < b.size(); ++i)
            y1h(i, static_cast<std::size_t>(b.y[i])) = 1.0;
        GaussianLatent lat = teacher.encode(hconcat(b.x, y1h), b.s_onehot);
        if (cfg.use_mu_targets) return lat.mu;
        const Matrix eps = sample_standard_normal(
            b.size(), teacher.latent_dim(),
            mix_seed(cfg.seed, 0x7ea70000ULL + epoch * 1000003ULL + bi));
        return reparameterize(lat, eps);
    };

    Student st = train_student_with_targets(targets, ds, teacher.latent_dim(),
                                            teacher.schema_hash(), cfg, trace);
    if (st.parameter_count() >= teacher.encoder_parameter_count())
        throw ValidationError("train_student: student (" +
                              std::to_string(st.parameter_count()) +
                              " parameters) is not smaller than the teacher encoder (" +
                              std::to_string(teacher.encoder_parameter_count()) + ")");
    return st;
}

json Student::to_json() const {
    json j;
    j["format"] = "fair4free-student/1";
    j["schema_hash"] = hash_hex(schema_hash_);
    j["noise_dim"] = noise_dim_;
    j["hidden_dim"] = hidden_dim_;
    j["k"] = latent_dim_;
    json w;
    w["w1"] = matrix_to_json(w1_.value);
    w["b1"] = matrix_to_json(b1_.value);
    w["w2"] = matrix_to_json(w2_.value);
    w["b2"] = matrix_to_json(b2_.value);
    j["weights"] = w;
    return j;
}

Student Student::from_json(const json& j) {
    if (!j.contains("format") || j.at("format") != "fair4free-student/1")
        throw ValidationError("student artifact: unsupported or missing format tag");
    Student s;
    s.schema_hash_ = std::stoull(j.at("schema_hash").get<std::string>(), nullptr, 16);
    s.noise_dim_ = j.at("noise_dim").get<std::size_t>();
    s.hidden_dim_ = j.at("hidden_dim").get<std::size_t>();
    s.latent_dim_ = j.at("k").get<std::size_t>();
    const json& w = j.at("weights");
    auto load_param = [&](const char* name) {
        Matrix value = matrix_from_json(w.at(name), "student weights");
        ParamTensor p(value.rows(), value.cols());
        p.value = std::move(value);
        return p;
    };
    s.w1_ = load_param("w1");
    s.b1_ = load_param("b1");
    s.w2_ = load_param("w2");
    s.b2_ = load_param("b2");
    require_shape(s.w1_.value, s.noise_dim_, s.hidden_dim_, "student w1");
    require_shape(s.w2_.value, s.hidden_dim_, 2 * s.latent_dim_, "student w2");
    return s;
}

void Student::save(const std::string& path) const { write_json_file(to_json(), path); }

Student Student::load(const std::string& path) { return from_json(read_json_file(path)); }

}  // namespace f4f
