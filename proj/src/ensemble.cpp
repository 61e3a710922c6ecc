#include "spraygrid/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spraygrid/errors.hpp"

namespace spraygrid {

using nlohmann::json;

VotingEnsemble::VotingEnsemble(std::vector<RegressorPtr> members, std::vector<double> weights)
    : members_(std::move(members)), weights_(std::move(weights)) {
    if (members_.empty()) fail(ErrorKind::Parameter, "ensemble needs at least one member");
    if (weights_.size() != members_.size())
        fail(ErrorKind::Parameter, "ensemble weights must match the member count");
    double sum = 0.0;
    for (double w : weights_) {
        if (w < 0.0) fail(ErrorKind::Parameter, "ensemble weights must be non-negative");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        fail(ErrorKind::Parameter, "ensemble weights must sum to 1");
}

std::vector<float> VotingEnsemble::predict(std::span<const float> x, std::size_t rows) const {
    std::vector<double> acc(rows, 0.0);
    for (std::size_t m = 0; m < members_.size(); ++m) {
        const std::vector<float> p = members_[m]->predict(x, rows);
        const double w = weights_[m];
        for (std::size_t i = 0; i < rows; ++i) acc[i] += w * p[i];
    }
    std::vector<float> out(rows);
    for (std::size_t i = 0; i < rows; ++i)
        out[i] = static_cast<float>(std::clamp(acc[i], 0.0, 1.0));
    return out;
}

json VotingEnsemble::to_json() const {
    json members = json::array();
    for (const auto& m : members_) members.push_back(m->to_json());
    return json{{"schema", "spraygrid.model/1"},
                {"type", "voting_ensemble"},
                {"weights", weights_},
                {"members", std::move(members)}};
}

// hook used by regressor_from_json for the recursive case
RegressorPtr voting_ensemble_from_json(const json& j) {
    std::vector<RegressorPtr> members;
    for (const auto& mj : j.at("members")) members.push_back(regressor_from_json(mj));
    return std::make_shared<VotingEnsemble>(std::move(members),
                                            j.at("weights").get<std::vector<double>>());
}

std::vector<double> uniform_weights(std::size_t n) {
    if (n == 0) fail(ErrorKind::Parameter, "ensemble needs at least one member");
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::shared_ptr<VotingEnsemble> make_ensemble(std::vector<RegressorPtr> members,
                                              const std::vector<double>* weights) {
    std::vector<double> w = weights ? *weights : uniform_weights(members.size());
    return std::make_shared<VotingEnsemble>(std::move(members), std::move(w));
}

namespace {

// Quadratic form of the held-out R^2 (determination): with member prediction
// matrix P and truth y, SS_res(w) = y'y - 2 w'(P'y) + w'(P'P)w, so every
// candidate evaluates in O(members^2).
struct R2Surface {
    std::size_t m = 0;
    double yy = 0.0, ss_tot = 0.0;
    std::vector<double> gram; // m x m
    std::vector<double> py;   // m

    static R2Surface build(const std::vector<std::vector<float>>& preds,
                           std::span<const float> truth) {
        R2Surface s;
        s.m = preds.size();
        const std::size_t n = truth.size();
        double ybar = 0.0;
        for (float y : truth) ybar += y;
        ybar /= static_cast<double>(n);
        for (float y : truth) {
            s.yy += double(y) * y;
            s.ss_tot += (y - ybar) * (y - ybar);
        }
        if (s.ss_tot <= 0.0)
            fail(ErrorKind::Validation, "weight optimization needs non-constant truth");
        s.gram.assign(s.m * s.m, 0.0);
        s.py.assign(s.m, 0.0);
        for (std::size_t a = 0; a < s.m; ++a) {
            for (std::size_t i = 0; i < n; ++i) s.py[a] += double(preds[a][i]) * truth[i];
            for (std::size_t b = a; b < s.m; ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += double(preds[a][i]) * preds[b][i];
                s.gram[a * s.m + b] = dot;
                s.gram[b * s.m + a] = dot;
            }
        }
        return s;
    }

    double r2(const std::vector<double>& w) const {
        double quad = 0.0, lin = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            lin += w[a] * py[a];
            double row = 0.0;
            for (std::size_t b = 0; b < m; ++b) row += gram[a * m + b] * w[b];
            quad += w[a] * row;
        }
        const double ss_res = yy - 2.0 * lin + quad;
        return 1.0 - ss_res / ss_tot;
    }
};

void check_member_preds(const std::vector<std::vector<float>>& preds,
                        std::span<const float> truth) {
    if (preds.size() < 2)
        fail(ErrorKind::Parameter, "weight optimization needs at least 2 members");
    if (truth.empty()) fail(ErrorKind::Parameter, "weight optimization needs held-out rows");
    for (const auto& p : preds)
        if (p.size() != truth.size())
            fail(ErrorKind::Parameter, "member predictions must match the held-out length");
}

// Enumerates w on the simplex grid {k/denom}, lexicographic, calling fn.
void for_each_grid_point(std::size_t m, int denom,
                         const std::function<void(const std::vector<double>&)>& fn) {
    std::vector<int> k(m, 0);
    std::vector<double> w(m, 0.0);
    const double inv = 1.0 / denom;

    // odometer over the first m-1 coordinates; the last takes the remainder
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
        if (pos == m - 1) {
            k[pos] = left;
            for (std::size_t i = 0; i < m; ++i) w[i] = k[i] * inv;
            fn(w);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            k[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, denom);
}

} // namespace

WeightOptResult optimize_weights(const std::vector<std::vector<float>>& member_preds,
                                 std::span<const float> truth) {
    check_member_preds(member_preds, truth);
    const std::size_t m = member_preds.size();
    const R2Surface surface = R2Surface::build(member_preds, truth);

    WeightOptResult res;
    if (truth.size() < 10)
        res.warning = "held-out set has fewer than 10 rows; weights are unreliable";

    const std::vector<double> uniform = uniform_weights(m);
    res.uniform_r2 = surface.r2(uniform);

    // full grid at resolution 0.01
    std::vector<double> best = uniform;
    double best_r2 = res.uniform_r2;
    for_each_grid_point(m, 100, [&](const std::vector<double>& w) {
        const double r2 = surface.r2(w);
        if (r2 > best_r2 + 1e-15) {
            best_r2 = r2;
            best = w;
        }
    });

    // local refinement: move mass between pairs at shrinking step sizes
    for (double step : {0.005, 0.002, 0.001, 0.0005}) {
        bool improved = true;
        int guard = 0;
        while (improved && guard++ < 400) {
            improved = false;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    if (i == j || best[i] < step) continue;
                    std::vector<double> w = best;
                    w[i] -= step;
                    w[j] += step;
                    const double r2 = surface.r2(w);
                    if (r2 > best_r2 + 1e-15) {
                        best_r2 = r2;
                        best = std::move(w);
                        improved = true;
                    }
                }
            }
        }
    }

    // tie-break: stay uniform unless the search genuinely beat it
    if (best_r2 <= res.uniform_r2 + 1e-10) {
        res.weights = uniform;
        res.best_r2 = res.uniform_r2;
    } else {
        res.weights = best;
        res.best_r2 = best_r2;
    }
    return res;
}

WeightOptResult optimize_weights(const std::vector<RegressorPtr>& members,
                                 const Dataset& heldout) {
    std::vector<std::vector<float>> preds;
    preds.reserve(members.size());
    for (const auto& mptr : members) preds.push_back(mptr->predict(heldout));
    return optimize_weights(preds, heldout.y);
}

SubsetSearchResult subset_search(const std::vector<std::vector<float>>& candidate_preds,
                                 std::span<const float> truth, std::size_t size) {
    if (size < 1) fail(ErrorKind::Parameter, "subset size must be >= 1");
    if (candidate_preds.size() < size)
        fail(ErrorKind::Parameter, "need at least 'size' candidates");
    for (const auto& p : candidate_preds)
        if (p.size() != truth.size())
            fail(ErrorKind::Parameter, "candidate predictions must match the held-out length");

    const std::size_t n = truth.size();
    const std::size_t m = candidate_preds.size();

    SubsetSearchResult res;
    std::vector<std::size_t> pick(size);
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<float> combo(n);

    const double inv = 1.0 / static_cast<double>(size);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t s : pick) acc += candidate_preds[s][i];
            combo[i] = static_cast<float>(acc * inv);
        }
        const double r2 = compute_metrics(combo, truth, R2Variant::Determination).r2;
        res.log.push_back({pick, r2});
        ++res.evaluations;
        if (res.best.empty() || r2 > res.best_r2) { // strict: lexicographic first wins ties
            res.best_r2 = r2;
            res.best = pick;
        }

        // next combination in lexicographic order
        std::size_t i = size;
        while (i-- > 0) {
            if (pick[i] != i + m - size) {
                ++pick[i];
                for (std::size_t j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) return res;
        }
    }
}

SubsetSearchResult subset_search(const std::vector<RegressorPtr>& candidates,
                                 const Dataset& heldout, std::size_t size) {
    std::vector<std::vector<float>> preds;
    preds.reserve(candidates.size());
    for (const auto& c : candidates) preds.push_back(c->predict(heldout));
    return subset_search(preds, heldout.y, size);
}

} // namespace spraygrid
