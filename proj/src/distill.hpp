#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fairvae.hpp"

namespace f4f {

// How batch rows of teacher latents and student samples are matched for the
// L1 term: direct = literal batch-index alignment; sorted = per-dimension
// ascending sort of both batches first (a quantile-matching surrogate —
// direct pairing of independently drawn samples pulls the student toward
// per-dimension medians).
enum class Pairing { direct, sorted };

const char* pairing_name(Pairing p);
Pairing pairing_from_name(const std::string& name);

struct DistillConfig {
    std::size_t epochs = 5000;
    std::size_t batch_size = 2048;
    AdamConfig adam{1e-5};
    Pairing pairing = Pairing::direct;
    std::uint64_t seed = 0;
    bool use_mu_targets = false;  // target teacher mu instead of a sampled z
    std::size_t noise_dim = 64;
    std::size_t hidden_dim = 32;

    void validate() const;
};

struct StudentForward {
    GaussianLatent latent;  // mu', logvar'
    Matrix z;               // reparameterized sample
};

// Noise-fed student: two affine layers noise_dim -> hidden -> 2k. Its only
// input is Gaussian noise; it never sees dataset rows.
class Student {
public:
    Student() = default;
    Student(std::size_t noise_dim, std::size_t hidden_dim, std::size_t latent_dim,
            std::uint64_t schema_hash, Rng& init_rng);

    std::size_t noise_dim() const { return noise_dim_; }
    std::size_t hidden_dim() const { return hidden_dim_; }
    std::size_t latent_dim() const { return latent_dim_; }
    std::uint64_t schema_hash() const { return schema_hash_; }
    std::size_t parameter_count() const;

    StudentForward forward(const Matrix& noise, const Matrix& eps) const;

    std::vector<ParamTensor*> parameters();
    std::vector<const ParamTensor*> parameters() const;

    json to_json() const;
    static Student from_json(const json& j);
    void save(const std::string& path) const;
    static Student load(const std::string& path);

private:
    std::size_t noise_dim_ = 0;
    std::size_t hidden_dim_ = 0;
    std::size_t latent_dim_ = 0;
    std::uint64_t schema_hash_ = 0;
    ParamTensor w1_, b1_, w2_, b2_;
};

struct DistillLossParts {
    double total = 0.0;
    double distill = 0.0;  // mean over batch of sum_j |z_j - z'_j| under the pairing
    double kl = 0.0;       // gaussian_kl(mu', logvar') / batch
};

DistillLossParts distill_loss(const Matrix& z, const Matrix& z_prime,
                              const GaussianLatent& lat_prime, Pairing pairing);

struct DistillEpochTrace {
    std::size_t epoch = 0;
    double distill = 0.0;
    double kl = 0.0;
    double total = 0.0;
};

// Supplies the latent targets for one batch. Receives only what the teacher
// path needs; the student side never touches the batch contents.
using LatentTargetFn =
    std::function<Matrix(const Batch& batch, std::size_t epoch, std::size_t batch_index)>;

Student train_student_with_targets(const LatentTargetFn& targets, const EncodedDataset& ds,
                                   std::size_t latent_dim, std::uint64_t schema_hash,
                                   const DistillConfig& cfg,
                                   std::vector<DistillEpochTrace>* trace = nullptr);

Student train_student(const Teacher& teacher, const EncodedDataset& ds,
                      const DistillConfig& cfg,
                      std::vector<DistillEpochTrace>* trace = nullptr);

}  // namespace f4f
