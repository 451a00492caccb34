#pragma once

#include <cstdint>
#include <vector>

#include "dataio.hpp"
#include "nn.hpp"

namespace f4f {

struct GaussianLatent {
    Matrix mu;      // B×k
    Matrix logvar;  // B×k
};

struct TeacherTrainConfig {
    int beta = 9;  // fairness penalty weight, integer in {0..9}
    std::size_t epochs = 200;
    std::size_t batch_size = 2048;
    AdamConfig adam{1e-3};
    std::uint64_t seed = 0;
    std::size_t latent_dim = 8;
    std::size_t hidden_dim = 64;

    void validate() const;
};

struct TeacherEpochTrace {
    std::size_t epoch = 0;  // 1-based
    double kl = 0.0;        // per-row means over the epoch
    double nll = 0.0;
    double v2 = 0.0;
    double total = 0.0;
};

// Conditional VAE: encoder (x, s) -> diagonal Gaussian over z, decoder
// (z, s) -> per-column reconstruction heads. The autoencoded space is the
// feature columns plus the target appended as a final one-hot group
// (FeatureLayout::features_with_target), so the decoder can label the
// records it generates.
class Teacher {
public:
    Teacher() = default;
    Teacher(std::size_t input_dim, std::size_t n_groups, std::size_t hidden_dim,
            std::size_t latent_dim, std::uint64_t schema_hash, Rng& init_rng);

    std::size_t input_dim() const { return input_dim_; }
    std::size_t n_groups() const { return n_groups_; }
    std::size_t hidden_dim() const { return hidden_dim_; }
    std::size_t latent_dim() const { return latent_dim_; }
    std::uint64_t schema_hash() const { return schema_hash_; }
    std::size_t encoder_parameter_count() const;

    GaussianLatent encode(const Matrix& x, const Matrix& s_onehot) const;
    Matrix decode(const Matrix& z, const Matrix& s_onehot) const;

    std::vector<ParamTensor*> parameters();
    std::vector<const ParamTensor*> parameters() const;

    json to_json() const;
    static Teacher from_json(const json& j);
    void save(const std::string& path) const;
    static Teacher load(const std::string& path);

private:
    std::size_t input_dim_ = 0;
    std::size_t n_groups_ = 0;
    std::size_t hidden_dim_ = 0;
    std::size_t latent_dim_ = 0;
    std::uint64_t schema_hash_ = 0;
    ParamTensor enc_w1_, enc_b1_, enc_w2_, enc_b2_;
    ParamTensor dec_w1_, dec_b1_, dec_w2_, dec_b2_;
};

// z = mu + exp(logvar/2)·eps elementwise
Matrix reparameterize(const GaussianLatent& lat, const Matrix& eps);

// Negative log-likelihood of the reconstruction: softmax cross-entropy per
// categorical group plus 1/2·(x - x̂)² per numeric column, summed over rows.
double reconstruction_loss(const Matrix& outputs, const Matrix& targets,
                           const FeatureLayout& layout);
// scale · d(loss)/d(outputs)
Matrix reconstruction_loss_backward(const Matrix& outputs, const Matrix& targets,
                                    const FeatureLayout& layout, double scale);

struct TeacherBatchLoss {
    double kl = 0.0;     // mean over batch rows
    double nll = 0.0;    // mean over batch rows
    double v2 = 0.0;     // distance-covariance penalty (unweighted)
    double total = 0.0;  // kl + nll + beta·v2
};

// Loss of a single batch with the reparameterization noise supplied, so the
// value is a deterministic function of the parameters (finite-difference
// checks rely on this). Does not touch gradients.
TeacherBatchLoss teacher_batch_loss(const Teacher& t, const Matrix& x, const Matrix& s_onehot,
                                    const FeatureLayout& layout, int beta, const Matrix& eps);

// Same forward pass, but also accumulates parameter gradients.
TeacherBatchLoss teacher_accumulate_gradients(Teacher& t, const Matrix& x,
                                              const Matrix& s_onehot,
                                              const FeatureLayout& layout, int beta,
                                              const Matrix& eps);

Teacher train_teacher(const EncodedDataset& ds, const TeacherTrainConfig& cfg,
                      std::vector<TeacherEpochTrace>* trace = nullptr);

// Encoder means over a whole dataset; the z used for latent diagnostics.
Matrix teacher_latent_mu(const Teacher& t, const EncodedDataset& ds);
// dcor(mu, s) over the dataset, memory-light for large n
double teacher_latent_dcor(const Teacher& t, const EncodedDataset& ds);

}  // namespace f4f
