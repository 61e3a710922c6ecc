#include "spraygrid/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spraygrid/errors.hpp"
#include "spraygrid/parallel.hpp"
#include "spraygrid/rng.hpp"

namespace spraygrid {

using nlohmann::json;

namespace {

constexpr const char* kModelSchema = "spraygrid.model/1";

float clamp01(double v) {
    return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

void require_rows(const Dataset& train, const char* what) {
    if (train.rows == 0 || train.cols == 0)
        fail(ErrorKind::Parameter, std::string(what) + ": empty training set");
    if (train.x.size() != train.rows * train.cols || train.y.size() != train.rows)
        fail(ErrorKind::Parameter, std::string(what) + ": inconsistent training arrays");
}

// Per-column z-score parameters fitted on the training split only.
struct Standardizer {
    std::vector<double> mean, sd;

    static Standardizer fit(const Dataset& d) {
        Standardizer s;
        s.mean.assign(d.cols, 0.0);
        s.sd.assign(d.cols, 0.0);
        for (std::size_t i = 0; i < d.rows; ++i)
            for (std::size_t c = 0; c < d.cols; ++c) s.mean[c] += d.x[i * d.cols + c];
        for (double& m : s.mean) m /= static_cast<double>(d.rows);
        for (std::size_t i = 0; i < d.rows; ++i)
            for (std::size_t c = 0; c < d.cols; ++c) {
                const double dv = d.x[i * d.cols + c] - s.mean[c];
                s.sd[c] += dv * dv;
            }
        for (double& v : s.sd) {
            v = std::sqrt(v / static_cast<double>(d.rows));
            if (v <= 0.0) v = 1.0; // constant column: leave it centered
        }
        return s;
    }

    double apply_one(double v, std::size_t c) const { return (v - mean[c]) / sd[c]; }

    json to_json() const { return json{{"mean", mean}, {"sd", sd}}; }

    static Standardizer from_json(const json& j) {
        Standardizer s;
        s.mean = j.at("mean").get<std::vector<double>>();
        s.sd = j.at("sd").get<std::vector<double>>();
        return s;
    }
};

// ---------------------------------------------------------------------------
// k-nearest-neighbour mean
// ---------------------------------------------------------------------------

class KnnRegressor final : public Regressor {
public:
    KnnRegressor(int k, std::size_t cols, Standardizer std, std::vector<float> xs,
                 std::vector<float> y)
        : k_(k), cols_(cols), std_(std::move(std)), xs_(std::move(xs)), y_(std::move(y)) {}

    const std::string& name() const override {
        static const std::string n = "knn";
        return n;
    }

    std::vector<float> predict(std::span<const float> x, std::size_t rows) const override {
        if (x.size() != rows * cols_)
            fail(ErrorKind::Parameter, "knn: feature width differs from the fitted model");
        const std::size_t n = y_.size();
        std::vector<float> out(rows);
        std::vector<std::pair<double, std::size_t>> dist(n);
        std::vector<double> q(cols_);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t c = 0; c < cols_; ++c) q[c] = std_.apply_one(x[i * cols_ + c], c);
            for (std::size_t t = 0; t < n; ++t) {
                double d2 = 0.0;
                const float* row = xs_.data() + t * cols_;
                for (std::size_t c = 0; c < cols_; ++c) {
                    const double dv = q[c] - row[c];
                    d2 += dv * dv;
                }
                dist[t] = {d2, t}; // index breaks distance ties
            }
            std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
            double sum = 0.0;
            for (int j = 0; j < k_; ++j) sum += y_[dist[j].second];
            out[i] = clamp01(sum / k_);
        }
        return out;
    }

    json to_json() const override {
        return json{{"schema", kModelSchema}, {"type", "knn"},           {"k", k_},
                    {"cols", cols_},          {"standardizer", std_.to_json()},
                    {"x", xs_},               {"y", y_}};
    }

private:
    int k_;
    std::size_t cols_;
    Standardizer std_;
    std::vector<float> xs_; // standardized training features, row-major
    std::vector<float> y_;
};

// ---------------------------------------------------------------------------
// extremely-randomized tree ensemble
// ---------------------------------------------------------------------------

struct TreeNode {
    int feature = -1; // -1 marks a leaf
    float threshold = 0.0f;
    int left = -1, right = -1;
    float value = 0.0f;
};

using Tree = std::vector<TreeNode>;

class TreeBuilder {
public:
    TreeBuilder(const Dataset& d, const TreeParams& p, Rng rng)
        : d_(d), p_(p), rng_(rng) {}

    Tree build() {
        Tree tree;
        std::vector<std::uint32_t> idx(d_.rows);
        std::iota(idx.begin(), idx.end(), 0u);
        grow(tree, idx, 0);
        return tree;
    }

private:
    int grow(Tree& tree, std::vector<std::uint32_t>& idx, int depth) {
        const int node_id = static_cast<int>(tree.size());
        tree.emplace_back();

        double sum = 0.0, sumsq = 0.0;
        for (auto i : idx) {
            sum += d_.y[i];
            sumsq += double(d_.y[i]) * d_.y[i];
        }
        const double mean = sum / static_cast<double>(idx.size());
        const double sse = sumsq - sum * mean;

        const bool stop = depth >= p_.max_depth ||
                          idx.size() < 2 * static_cast<std::size_t>(p_.min_leaf) ||
                          sse <= 1e-12;
        int best_feature = -1;
        double best_threshold = 0.0, best_score = 1e300;
        if (!stop) {
            // one uniform threshold per feature, keep the lowest weighted SSE
            for (std::size_t f = 0; f < d_.cols; ++f) {
                float lo = d_.x[std::size_t(idx[0]) * d_.cols + f], hi = lo;
                for (auto i : idx) {
                    const float v = d_.x[std::size_t(i) * d_.cols + f];
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                if (!(lo < hi)) continue;
                const double t = rng_.uniform(lo, hi);
                double lsum = 0, lsq = 0, rsum = 0, rsq = 0;
                std::size_t ln = 0;
                for (auto i : idx) {
                    const double v = d_.x[std::size_t(i) * d_.cols + f];
                    const double y = d_.y[i];
                    if (v < t) {
                        lsum += y;
                        lsq += y * y;
                        ++ln;
                    } else {
                        rsum += y;
                        rsq += y * y;
                    }
                }
                const std::size_t rn = idx.size() - ln;
                if (ln < static_cast<std::size_t>(p_.min_leaf) ||
                    rn < static_cast<std::size_t>(p_.min_leaf))
                    continue;
                const double score = (lsq - lsum * lsum / double(ln)) +
                                     (rsq - rsum * rsum / double(rn));
                if (score < best_score - 1e-15) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = t;
                }
            }
        }

        if (best_feature < 0) {
            tree[node_id].value = static_cast<float>(mean);
            return node_id;
        }

        std::vector<std::uint32_t> left, right;
        left.reserve(idx.size());
        right.reserve(idx.size());
        for (auto i : idx) {
            if (d_.x[std::size_t(i) * d_.cols + best_feature] <
                static_cast<float>(best_threshold))
                left.push_back(i);
            else
                right.push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        tree[node_id].feature = best_feature;
        tree[node_id].threshold = static_cast<float>(best_threshold);
        const int l = grow(tree, left, depth + 1);
        tree[node_id].left = l;
        const int r = grow(tree, right, depth + 1);
        tree[node_id].right = r;
        return node_id;
    }

    const Dataset& d_;
    const TreeParams& p_;
    Rng rng_;
};

class RandomTreeEnsemble final : public Regressor {
public:
    RandomTreeEnsemble(TreeParams params, std::size_t cols, std::vector<Tree> trees)
        : params_(params), cols_(cols), trees_(std::move(trees)) {}

    const std::string& name() const override {
        static const std::string n = "random_tree_ensemble";
        return n;
    }

    std::vector<float> predict(std::span<const float> x, std::size_t rows) const override {
        if (x.size() != rows * cols_)
            fail(ErrorKind::Parameter, "trees: feature width differs from the fitted model");
        std::vector<float> out(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            const float* row = x.data() + i * cols_;
            double sum = 0.0;
            for (const Tree& tree : trees_) {
                int node = 0;
                while (tree[node].feature >= 0)
                    node = row[tree[node].feature] < tree[node].threshold ? tree[node].left
                                                                          : tree[node].right;
                sum += tree[node].value;
            }
            out[i] = clamp01(sum / static_cast<double>(trees_.size()));
        }
        return out;
    }

    json to_json() const override {
        json trees = json::array();
        for (const Tree& tree : trees_) {
            json nodes = json::array();
            for (const TreeNode& n : tree)
                nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
            trees.push_back(std::move(nodes));
        }
        return json{{"schema", kModelSchema},
                    {"type", "random_tree_ensemble"},
                    {"cols", cols_},
                    {"n_trees", params_.n_trees},
                    {"max_depth", params_.max_depth},
                    {"min_leaf", params_.min_leaf},
                    {"seed", params_.seed},
                    {"trees", std::move(trees)}};
    }

private:
    TreeParams params_;
    std::size_t cols_;
    std::vector<Tree> trees_;
};

// ---------------------------------------------------------------------------
// ridge linear
// ---------------------------------------------------------------------------

// In-place Cholesky solve of (A + lambda I) w = b for a symmetric A.
std::vector<double> spd_solve(std::vector<double> a, std::vector<double> b, std::size_t n,
                              double lambda) {
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += lambda;
    // decompose A = L L^T
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a[i * n + i]));
    const double floor_pivot = std::max(scale, 1.0) * 1e-12;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (d <= floor_pivot)
            fail(ErrorKind::Solver,
                 "normal equations are rank-deficient; use ridge_lambda > 0");
        const double l = std::sqrt(d);
        a[j * n + j] = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = v / l;
        }
    }
    // forward then back substitution
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= a[i * n + k] * b[k];
        b[i] = v / a[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) v -= a[k * n + ii] * b[k];
        b[ii] = v / a[ii * n + ii];
    }
    return b;
}

class RidgeLinear final : public Regressor {
public:
    RidgeLinear(double lambda, Standardizer std, double intercept, std::vector<double> coef)
        : lambda_(lambda), std_(std::move(std)), intercept_(intercept), coef_(std::move(coef)) {}

    const std::string& name() const override {
        static const std::string n = "ridge_linear";
        return n;
    }

    std::vector<float> predict(std::span<const float> x, std::size_t rows) const override {
        const std::size_t cols = coef_.size();
        if (x.size() != rows * cols)
            fail(ErrorKind::Parameter, "ridge: feature width differs from the fitted model");
        std::vector<float> out(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            double v = intercept_;
            for (std::size_t c = 0; c < cols; ++c)
                v += coef_[c] * std_.apply_one(x[i * cols + c], c);
            out[i] = clamp01(v);
        }
        return out;
    }

    json to_json() const override {
        return json{{"schema", kModelSchema},   {"type", "ridge_linear"},
                    {"lambda", lambda_},        {"standardizer", std_.to_json()},
                    {"intercept", intercept_},  {"coef", coef_}};
    }

private:
    double lambda_;
    Standardizer std_;
    double intercept_; // the train target mean; unpenalized
    std::vector<double> coef_;
};

} // namespace

RegressorPtr fit_knn(const Dataset& train, int k) {
    require_rows(train, "knn");
    if (k < 1 || static_cast<std::size_t>(k) > train.rows)
        fail(ErrorKind::Parameter, "knn: k must be in 1..train rows");
    Standardizer std = Standardizer::fit(train);
    std::vector<float> xs(train.x.size());
    for (std::size_t i = 0; i < train.rows; ++i)
        for (std::size_t c = 0; c < train.cols; ++c)
            xs[i * train.cols + c] =
                static_cast<float>(std.apply_one(train.x[i * train.cols + c], c));
    return std::make_shared<KnnRegressor>(k, train.cols, std::move(std), std::move(xs),
                                          train.y);
}

RegressorPtr fit_random_tree_ensemble(const Dataset& train, const TreeParams& params) {
    require_rows(train, "trees");
    if (params.n_trees < 1) fail(ErrorKind::Parameter, "trees: n_trees must be >= 1");
    if (params.max_depth < 0 || params.min_leaf < 1)
        fail(ErrorKind::Parameter, "trees: bad depth/min_leaf");
    std::vector<Tree> trees(params.n_trees);
    // per-tree seed substreams keep the model independent of the thread count
    parallel_for(static_cast<std::size_t>(params.n_trees), [&](std::size_t t) {
        TreeBuilder builder(train, params, Rng(params.seed, t));
        trees[t] = builder.build();
    });
    return std::make_shared<RandomTreeEnsemble>(params, train.cols, std::move(trees));
}

RegressorPtr fit_ridge_linear(const Dataset& train, double ridge_lambda) {
    require_rows(train, "ridge");
    if (ridge_lambda < 0.0) fail(ErrorKind::Parameter, "ridge_lambda must be >= 0");
    const std::size_t n = train.cols;
    Standardizer std = Standardizer::fit(train);

    double ybar = 0.0;
    for (float y : train.y) ybar += y;
    ybar /= static_cast<double>(train.rows);

    std::vector<double> xtx(n * n, 0.0), xty(n, 0.0), row(n);
    for (std::size_t i = 0; i < train.rows; ++i) {
        for (std::size_t c = 0; c < n; ++c)
            row[c] = std.apply_one(train.x[i * n + c], c);
        const double yc = train.y[i] - ybar;
        for (std::size_t a = 0; a < n; ++a) {
            xty[a] += row[a] * yc;
            for (std::size_t b = a; b < n; ++b) xtx[a * n + b] += row[a] * row[b];
        }
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < a; ++b) xtx[a * n + b] = xtx[b * n + a];

    std::vector<double> coef = spd_solve(std::move(xtx), std::move(xty), n, ridge_lambda);
    return std::make_shared<RidgeLinear>(ridge_lambda, std::move(std), ybar, std::move(coef));
}

json regressor_to_json(const Regressor& r) {
    return r.to_json();
}

RegressorPtr regressor_from_json(const json& j) {
    if (!j.contains("type")) fail(ErrorKind::Schema, "model JSON is missing 'type'");
    if (j.value("schema", std::string()) != kModelSchema)
        fail(ErrorKind::Schema, "unsupported model schema (expected spraygrid.model/1)");
    const std::string type = j.at("type").get<std::string>();
    if (type == "knn") {
        return std::make_shared<KnnRegressor>(
            j.at("k").get<int>(), j.at("cols").get<std::size_t>(),
            Standardizer::from_json(j.at("standardizer")),
            j.at("x").get<std::vector<float>>(), j.at("y").get<std::vector<float>>());
    }
    if (type == "random_tree_ensemble") {
        TreeParams p;
        p.n_trees = j.at("n_trees").get<int>();
        p.max_depth = j.at("max_depth").get<int>();
        p.min_leaf = j.at("min_leaf").get<int>();
        p.seed = j.at("seed").get<std::uint64_t>();
        std::vector<Tree> trees;
        for (const auto& tj : j.at("trees")) {
            Tree tree;
            for (const auto& nj : tj) {
                TreeNode n;
                n.feature = nj[0].get<int>();
                n.threshold = nj[1].get<float>();
                n.left = nj[2].get<int>();
                n.right = nj[3].get<int>();
                n.value = nj[4].get<float>();
                tree.push_back(n);
            }
            trees.push_back(std::move(tree));
        }
        return std::make_shared<RandomTreeEnsemble>(p, j.at("cols").get<std::size_t>(),
                                                    std::move(trees));
    }
    if (type == "ridge_linear") {
        return std::make_shared<RidgeLinear>(
            j.at("lambda").get<double>(), Standardizer::from_json(j.at("standardizer")),
            j.at("intercept").get<double>(), j.at("coef").get<std::vector<double>>());
    }
    if (type == "voting_ensemble") {
        // defined in ensemble.cpp; forwarded there via this hook
        extern RegressorPtr voting_ensemble_from_json(const json&);
        return voting_ensemble_from_json(j);
    }
    fail(ErrorKind::Schema, "unknown model type '" + type + "'");
}

} // namespace spraygrid
