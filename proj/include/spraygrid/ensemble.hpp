#pragma once

#include <memory>
#include <string>
#include <vector>

#include "spraygrid/metrics.hpp"
#include "spraygrid/regressor.hpp"

namespace spraygrid {

// Convex-weighted average of member predictions. Weights are non-negative
// and sum to 1; the ensemble output is therefore bounded by the member
// predictions sample-wise.
class VotingEnsemble : public Regressor {
public:
    VotingEnsemble(std::vector<RegressorPtr> members, std::vector<double> weights);

    using Regressor::predict;
    const std::string& name() const override { return name_; }
    std::vector<float> predict(std::span<const float> x, std::size_t rows) const override;
    nlohmann::json to_json() const override;

    const std::vector<RegressorPtr>& members() const { return members_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<RegressorPtr> members_;
    std::vector<double> weights_;
    std::string name_ = "voting_ensemble";
};

// Uniform weights when none are given.
std::shared_ptr<VotingEnsemble> make_ensemble(
    std::vector<RegressorPtr> members,
    const std::vector<double>* weights = nullptr);

std::vector<double> uniform_weights(std::size_t n);

struct WeightOptResult {
    std::vector<double> weights;
    double best_r2 = 0.0;    // held-out R^2 at the returned weights
    double uniform_r2 = 0.0; // held-out R^2 at uniform weights
    std::string warning;     // set when the held-out set is suspiciously small
};

// Maximizes held-out R^2 (determination) over the weight simplex: full grid
// at resolution 0.01, then pairwise-transfer refinement. The uniform point is
// always a candidate, so the result never scores below it; if nothing beats
// uniform the uniform weights are returned (tie-break).
WeightOptResult optimize_weights(const std::vector<std::vector<float>>& member_preds,
                                 std::span<const float> truth);

WeightOptResult optimize_weights(const std::vector<RegressorPtr>& members,
                                 const Dataset& heldout);

struct SubsetEval {
    std::vector<std::size_t> indices;
    double r2 = 0.0;
};

struct SubsetSearchResult {
    std::vector<std::size_t> best;  // indices into the candidate list
    double best_r2 = 0.0;
    std::size_t evaluations = 0;
    std::vector<SubsetEval> log;    // every evaluated subset, in order
};

// Evaluates every size-subset of the candidates with uniform weights on the
// held-out data and returns the argmax; ties keep the lexicographically
// first index tuple.
SubsetSearchResult subset_search(const std::vector<std::vector<float>>& candidate_preds,
                                 std::span<const float> truth, std::size_t size = 3);

SubsetSearchResult subset_search(const std::vector<RegressorPtr>& candidates,
                                 const Dataset& heldout, std::size_t size = 3);

} // namespace spraygrid
