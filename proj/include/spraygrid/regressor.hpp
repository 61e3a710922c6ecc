#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "spraygrid/features.hpp"

namespace spraygrid {

// Fitted per-pixel fraction predictor. predict() is pure and deterministic;
// outputs are clamped to [0,1] at this boundary.
class Regressor {
public:
    virtual ~Regressor() = default;

    virtual const std::string& name() const = 0;

    // x holds rows*cols row-major features with cols matching the fit data.
    virtual std::vector<float> predict(std::span<const float> x, std::size_t rows) const = 0;

    std::vector<float> predict(const Dataset& d) const { return predict(d.x, d.rows); }

    virtual nlohmann::json to_json() const = 0;
};

using RegressorPtr = std::shared_ptr<const Regressor>;

// k-nearest-neighbour mean with euclidean distance on z-scored features.
// Distance ties break toward the lowest training-row index.
RegressorPtr fit_knn(const Dataset& train, int k);

struct TreeParams {
    int n_trees = 50;
    int max_depth = 12;
    int min_leaf = 2;
    std::uint64_t seed = 0;
};

// Extremely-randomized trees: each node draws one uniform threshold per
// feature and keeps the split with the lowest weighted squared error; leaves
// predict their mean target and trees are averaged. Raw features, no
// scaling. The same seed gives a bit-identical model for any thread count.
RegressorPtr fit_random_tree_ensemble(const Dataset& train, const TreeParams& params);

// Ridge regression solved by normal equations with a Cholesky SPD solve.
// Features are z-scored on the train split and the intercept (the target
// mean) is unpenalized. lambda = 0 on rank-deficient data is a solver error.
RegressorPtr fit_ridge_linear(const Dataset& train, double ridge_lambda);

nlohmann::json regressor_to_json(const Regressor& r);
RegressorPtr regressor_from_json(const nlohmann::json& j);

} // namespace spraygrid
