#include "forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"
#include "rng.hpp"
#include "threads.hpp"

namespace f4f {

int Tree::predict_row(const double* row) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(node)];
        node = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    const TreeNode& leaf = nodes[static_cast<std::size_t>(node)];
    return leaf.votes[1] > leaf.votes[0] ? 1 : 0;
}

namespace {

double gini(double c0, double c1) {
    const double n = c0 + c1;
    if (n == 0.0) return 0.0;
    const double p0 = c0 / n, p1 = c1 / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct TreeBuilder {
    const Matrix& features;
    const std::vector<int>& labels;
    const ForestConfig& cfg;
    std::size_t m_try;
    double n_fit_rows;  // rows the tree was fit on, for importance weighting
    Rng rng;
    Tree tree;
    std::vector<double> importance;

    TreeBuilder(const Matrix& f, const std::vector<int>& l, const ForestConfig& c,
                std::size_t mtry, std::uint64_t tree_seed)
        : features(f),
          labels(l),
          cfg(c),
          m_try(mtry),
          n_fit_rows(0.0),
          rng(tree_seed),
          importance(f.cols(), 0.0) {}

    // sample m_try distinct feature indices
    std::vector<std::size_t> sample_features() {
        std::vector<std::size_t> all(features.cols());
        std::iota(all.begin(), all.end(), std::size_t{0});
        for (std::size_t i = 0; i < m_try; ++i) {
            std::size_t j = i + rng.uniform_index(all.size() - i);
            std::swap(all[i], all[j]);
        }
        all.resize(m_try);
        return all;
    }

    int build(std::vector<std::size_t>& rows, std::size_t depth) {
        double c0 = 0.0, c1 = 0.0;
        for (std::size_t r : rows) (labels[r] ? c1 : c0) += 1.0;

        const auto make_leaf = [&]() {
            TreeNode leaf;
            leaf.votes[0] = c0;
            leaf.votes[1] = c1;
            tree.nodes.push_back(leaf);
            return static_cast<int>(tree.nodes.size() - 1);
        };
        if (c0 == 0.0 || c1 == 0.0 || depth >= cfg.max_depth ||
            rows.size() < cfg.min_samples_split)
            return make_leaf();

        const double parent_gini = gini(c0, c1);
        double best_gain = 0.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;

        std::vector<std::pair<double, int>> vals;
        vals.reserve(rows.size());
        for (std::size_t f : sample_features()) {
            vals.clear();
            for (std::size_t r : rows) vals.emplace_back(features(r, f), labels[r]);
            std::sort(vals.begin(), vals.end());
            double l0 = 0.0, l1 = 0.0;
            for (std::size_t i = 1; i < vals.size(); ++i) {
                (vals[i - 1].second ? l1 : l0) += 1.0;
                if (vals[i].first <= vals[i - 1].first) continue;  // not a boundary
                const double r0 = c0 - l0, r1 = c1 - l1;
                const double nl = l0 + l1, nr = r0 + r1;
                const double gain = parent_gini -
                                    (nl * gini(l0, l1) + nr * gini(r0, r1)) /
                                        static_cast<double>(rows.size());
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (vals[i - 1].first + vals[i].first);
                }
            }
        }
        if (best_gain <= 0.0) return make_leaf();  // all sampled features constant

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            if (features(r, best_feature) <= best_threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        // boundary-midpoint thresholds always split at least one row each way
        importance[best_feature] +=
            (static_cast<double>(rows.size()) / n_fit_rows) * best_gain;

        rows.clear();
        rows.shrink_to_fit();
        TreeNode node;
        node.feature = static_cast<int>(best_feature);
        node.threshold = best_threshold;
        tree.nodes.push_back(node);
        const int self = static_cast<int>(tree.nodes.size() - 1);
        const int left = build(left_rows, depth + 1);
        const int right = build(right_rows, depth + 1);
        tree.nodes[static_cast<std::size_t>(self)].left = left;
        tree.nodes[static_cast<std::size_t>(self)].right = right;
        return self;
    }
};

}  // namespace

Forest Forest::fit(const Matrix& features, const std::vector<int>& labels,
                   const ForestConfig& cfg) {
    const std::size_t n = features.rows();
    if (n == 0 || labels.size() != n)
        throw ValidationError("fit_forest: empty data or label length mismatch");
    if (cfg.n_trees < 1) throw ValidationError("fit_forest: n_trees must be >= 1");
    bool has0 = false, has1 = false;
    for (int y : labels) (y ? has1 : has0) = true;
    if (!has0 || !has1)
        throw ValidationError(
            "fit_forest: labels contain a single class; the forest would be degenerate");

    Forest forest;
    forest.n_features_ = features.cols();
    const std::size_t m_try =
        cfg.features_per_split > 0
            ? std::min(cfg.features_per_split, features.cols())
            : std::max<std::size_t>(
                  1, static_cast<std::size_t>(std::floor(std::sqrt(
                         static_cast<double>(features.cols())))));

    forest.trees_.resize(cfg.n_trees);
    std::vector<std::vector<double>> tree_importance(cfg.n_trees);
    const int nthreads = worker_count();
#pragma omp parallel for num_threads(nthreads) schedule(dynamic)
    for (std::ptrdiff_t ti = 0; ti < static_cast<std::ptrdiff_t>(cfg.n_trees); ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        TreeBuilder builder(features, labels, cfg, m_try, mix_seed(cfg.seed, t));
        std::vector<std::size_t> rows;
        rows.reserve(n);
        if (cfg.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) rows.push_back(builder.rng.uniform_index(n));
        } else {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), std::size_t{0});
        }
        builder.n_fit_rows = static_cast<double>(rows.size());
        builder.build(rows, 0);
        forest.trees_[t] = std::move(builder.tree);
        tree_importance[t] = std::move(builder.importance);
    }

    forest.importance_.assign(features.cols(), 0.0);
    for (const auto& imp : tree_importance)
        for (std::size_t f = 0; f < imp.size(); ++f) forest.importance_[f] += imp[f];
    for (double& v : forest.importance_) v /= static_cast<double>(cfg.n_trees);
    return forest;
}

std::vector<int> Forest::predict(const Matrix& rows) const {
    if (trees_.empty()) throw ValidationError("predict: forest has no trees");
    if (rows.cols() != n_features_)
        throw DimensionError("predict: rows have " + std::to_string(rows.cols()) +
                             " features, forest was fit on " + std::to_string(n_features_));
    std::vector<int> out(rows.rows(), 0);
    const int nthreads = worker_count();
#pragma omp parallel for num_threads(nthreads) schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(rows.rows()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        int ones = 0;
        for (const Tree& t : trees_) ones += t.predict_row(rows.row_ptr(i));
        // exact ties go to class 0
        out[i] = 2 * ones > static_cast<int>(trees_.size()) ? 1 : 0;
    }
    return out;
}

}  // namespace f4f
