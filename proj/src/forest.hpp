#pragma once

#include <cstdint>
#include <vector>

#include "matrix.hpp"

namespace f4f {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t max_depth = 12;
    // features examined per split; 0 means floor(sqrt(d))
    std::size_t features_per_split = 0;
    bool bootstrap = true;
    std::size_t min_samples_split = 2;
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;  // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double votes[2] = {0.0, 0.0};  // class counts at fit time (leaves)
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    int predict_row(const double* row) const;
};

// CART forest with Gini splits on bootstrap samples. Trees derive their RNG
// from (seed, tree index) so parallel and sequential fits are identical.
class Forest {
public:
    static Forest fit(const Matrix& features, const std::vector<int>& labels,
                      const ForestConfig& cfg);

    std::vector<int> predict(const Matrix& rows) const;  // majority vote, ties -> 0
    std::size_t n_features() const { return n_features_; }
    std::size_t n_trees() const { return trees_.size(); }
    // mean impurity decrease per encoded feature, averaged over trees
    const std::vector<double>& raw_importance() const { return importance_; }

private:
    std::vector<Tree> trees_;
    std::vector<double> importance_;
    std::size_t n_features_ = 0;
};

}  // namespace f4f
