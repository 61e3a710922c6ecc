// spraygrid: command-line front end for the raster/spray-planning pipeline.
// Every subcommand prints a machine-readable JSON summary on stdout and, when
// given --out, echoes its configuration there for reproducibility.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spraygrid/composite.hpp"
#include "spraygrid/ensemble.hpp"
#include "spraygrid/features.hpp"
#include "spraygrid/grf.hpp"
#include "spraygrid/metrics.hpp"
#include "spraygrid/parallel.hpp"
#include "spraygrid/planner.hpp"
#include "spraygrid/png_io.hpp"
#include "spraygrid/registry.hpp"
#include "spraygrid/regressor.hpp"
#include "spraygrid/softmask.hpp"
#include "spraygrid/svgplot.hpp"
#include "spraygrid/synth.hpp"

namespace sg = spraygrid;
using nlohmann::json;

namespace {

int exit_code_for(sg::ErrorKind kind) {
    switch (kind) {
        case sg::ErrorKind::Io: return 3;
        case sg::ErrorKind::Schema: return 4;
        case sg::ErrorKind::Parameter: return 5;
        case sg::ErrorKind::Validation: return 5;
        case sg::ErrorKind::Alignment: return 6;
        case sg::ErrorKind::Infeasible: return 7;
        case sg::ErrorKind::Solver: return 8;
        case sg::ErrorKind::Integrity: return 9;
    }
    return 1;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) sg::fail(sg::ErrorKind::Io, "cannot write " + path.string());
    out << text;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

void echo_config(const std::filesystem::path& out_dir, const std::string& subcommand,
                 const json& config) {
    json echo{{"subcommand", subcommand}, {"config", config}};
    write_json_file(out_dir / "run_config.json", echo);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SPRAYGRID_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            sg::fail(sg::ErrorKind::Parameter, "SPRAYGRID_SEED is not an integer");
        }
    }
    return 0;
}

json area_to_json(const sg::AreaReport& a) {
    return json{{"total_land_acres", a.total_land_acres},
                {"weed_acres", a.weed_acres},
                {"weed_pct", a.weed_pct}};
}

// ---------------------------------------------------------------------------
// subcommand configs
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string spec_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

int run_synth(const SynthArgs& args) {
    sg::FieldSpec spec;
    if (!args.spec_path.empty()) {
        std::ifstream in(args.spec_path);
        if (!in) sg::fail(sg::ErrorKind::Io, "cannot open " + args.spec_path);
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded())
            sg::fail(sg::ErrorKind::Schema, "invalid JSON in " + args.spec_path);
        spec = sg::FieldSpec::from_json(j);
    }
    if (args.seed) spec.seed = *args.seed;

    const sg::SynthField field = sg::generate(spec);
    const std::filesystem::path out = args.out_dir;
    std::filesystem::create_directories(out);

    sg::write_grf(field.drone_mask, out / "drone_mask.grf");
    sg::write_mask_png(field.drone_mask, out / "drone_mask.png");
    sg::write_grf(field.satellite, out / "satellite.grf");
    sg::write_grf(field.fraction_mask, out / "truth_fraction.grf");
    sg::write_grf(field.prediction, out / "prediction.grf");

    const sg::AreaReport area = sg::area_report(field.fraction_mask);
    write_json_file(out / "area_report.json", area_to_json(area));
    write_json_file(out / "field_spec.json", spec.to_json());
    echo_config(out, "synth", spec.to_json());

    json summary{{"out_dir", out.string()},
                 {"drone_pixels", {field.drone_mask.width(), field.drone_mask.height()}},
                 {"satellite_pixels", {field.satellite.width(), field.satellite.height()}},
                 {"area_report", area_to_json(area)}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct SoftmaskArgs {
    std::string mask_path;
    int factor = 200;
    std::string out_dir;
};

int run_softmask(const SoftmaskArgs& args) {
    const sg::GeoRaster mask = sg::read_raster(args.mask_path);
    const sg::GeoRaster fraction = sg::block_fraction(mask, args.factor);
    const sg::AreaReport area = sg::area_report(fraction);

    const std::filesystem::path out = args.out_dir;
    std::filesystem::create_directories(out);
    sg::write_grf(fraction, out / "fraction.grf");
    write_json_file(out / "area_report.json", area_to_json(area));
    echo_config(out, "softmask", json{{"mask", args.mask_path}, {"factor", args.factor}});

    json summary{{"fraction", (out / "fraction.grf").string()},
                 {"factor", args.factor},
                 {"area_report", area_to_json(area)}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct FeaturesArgs {
    std::string sat_path, truth_path, splits_path, out_dir;
    std::vector<double> split_fractions = {0.45, 0.25, 0.30};
    int split_block = 1;
    std::optional<std::uint64_t> seed;
};

int run_features(const FeaturesArgs& args) {
    const sg::GeoRaster sat = sg::read_grf(args.sat_path);
    const sg::GeoRaster truth = sg::read_grf(args.truth_path);
    const sg::BandSet bands = sat.band_names().empty()
                                  ? sg::BandSet{}
                                  : sg::BandSet::from_band_names(sat.band_names());

    sg::GeoRaster splits;
    const std::uint64_t seed = resolve_seed(args.seed);
    if (!args.splits_path.empty()) {
        splits = sg::read_grf(args.splits_path);
    } else {
        if (args.split_fractions.size() != 3)
            sg::fail(sg::ErrorKind::Parameter, "--split-fractions needs 3 values");
        sg::SplitFractions f{args.split_fractions[0], args.split_fractions[1],
                             args.split_fractions[2]};
        splits = sg::split_assign(truth, f, args.split_block, seed);
    }

    const sg::FeatureTable table = sg::build_feature_table(sat, bands, truth, splits);

    const std::filesystem::path out = args.out_dir;
    std::filesystem::create_directories(out);
    sg::write_grf(splits, out / "splits.grf");
    table.write_csv(out / "features.csv");
    table.write_cache(out / "features.bin");
    echo_config(out, "features",
                json{{"sat", args.sat_path},
                     {"truth", args.truth_path},
                     {"splits", args.splits_path},
                     {"split_fractions", args.split_fractions},
                     {"split_block", args.split_block},
                     {"seed", seed}});

    json summary{{"rows", table.rows()},
                 {"train_rows", table.count(sg::Split::Train)},
                 {"heldout_rows", table.count(sg::Split::Heldout)},
                 {"test_rows", table.count(sg::Split::Test)},
                 {"csv", (out / "features.csv").string()},
                 {"cache", (out / "features.bin").string()},
                 {"splits", (out / "splits.grf").string()}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct FitArgs {
    std::string features_path, out_dir, sat_path, pred_out;
    int knn_k = 10;
    int n_trees = 50;
    int max_depth = 12;
    int min_leaf = 2;
    double ridge_lambda = 1e-3;
    std::string r2_variant = "determination";
    std::size_t subset_size = 3;
    std::optional<std::uint64_t> seed;
};

int run_fit(const FitArgs& args) {
    const std::filesystem::path fpath = args.features_path;
    const sg::FeatureTable table = fpath.extension() == ".bin"
                                       ? sg::FeatureTable::read_cache(fpath)
                                       : sg::FeatureTable::read_csv(fpath);
    const sg::Dataset train = table.dataset(sg::Split::Train);
    const sg::Dataset heldout = table.dataset(sg::Split::Heldout);
    const sg::Dataset test = table.dataset(sg::Split::Test);
    if (train.rows == 0) sg::fail(sg::ErrorKind::Parameter, "no training rows");
    if (heldout.rows == 0) sg::fail(sg::ErrorKind::Parameter, "no held-out rows");

    const std::uint64_t seed = resolve_seed(args.seed);
    const sg::R2Variant variant = sg::r2_variant_from_name(args.r2_variant);

    const int k = std::min<int>(args.knn_k, static_cast<int>(train.rows));
    sg::TreeParams tp;
    tp.n_trees = args.n_trees;
    tp.max_depth = args.max_depth;
    tp.min_leaf = args.min_leaf;
    tp.seed = seed;

    // a member whose fit fails is skipped with a report, not fatal
    std::vector<sg::RegressorPtr> members;
    json skipped = json::array();
    const std::vector<std::pair<std::string, std::function<sg::RegressorPtr()>>> recipes = {
        {"knn", [&] { return sg::fit_knn(train, k); }},
        {"random_tree_ensemble", [&] { return sg::fit_random_tree_ensemble(train, tp); }},
        {"ridge_linear", [&] { return sg::fit_ridge_linear(train, args.ridge_lambda); }},
    };
    for (const auto& [name, fit_fn] : recipes) {
        try {
            members.push_back(fit_fn());
        } catch (const sg::Error& e) {
            skipped.push_back({{"member", name}, {"error", e.what()}});
            std::cerr << "warning: skipping member " << name << ": " << e.what() << '\n';
        }
    }
    if (members.empty()) sg::fail(sg::ErrorKind::Parameter, "every member failed to fit");

    const sg::SubsetSearchResult search =
        sg::subset_search(members, heldout, std::min(args.subset_size, members.size()));
    std::vector<sg::RegressorPtr> chosen;
    for (std::size_t i : search.best) chosen.push_back(members[i]);

    auto uniform = sg::make_ensemble(chosen);
    const sg::WeightOptResult opt = sg::optimize_weights(chosen, heldout);
    auto weighted = sg::make_ensemble(chosen, &opt.weights);
    if (!opt.warning.empty()) std::cerr << "warning: " << opt.warning << '\n';

    std::vector<std::pair<std::string, sg::RegressorPtr>> lineup;
    for (const auto& m : members) lineup.emplace_back(m->name(), m);
    lineup.emplace_back("voting_uniform", uniform);
    lineup.emplace_back("voting_weighted", weighted);

    const std::filesystem::path out = args.out_dir;
    std::filesystem::create_directories(out / "models");
    json metrics_json;
    std::vector<std::pair<std::string, sg::MetricsReport>> held_rows, test_rows;
    for (const auto& [name, model] : lineup) {
        const sg::MetricsReport mh =
            sg::compute_metrics(model->predict(heldout), heldout.y, variant);
        held_rows.emplace_back(name, mh);
        metrics_json["heldout"][name] = sg::metrics_to_json(mh);
        if (test.rows >= 2) {
            const sg::MetricsReport mt =
                sg::compute_metrics(model->predict(test), test.y, variant);
            test_rows.emplace_back(name, mt);
            metrics_json["test"][name] = sg::metrics_to_json(mt);
        }
        write_json_file(out / "models" / (name + ".json"), model->to_json());
    }
    metrics_json["weights"] = opt.weights;
    metrics_json["weight_search"] = {{"uniform_r2", opt.uniform_r2},
                                     {"optimized_r2", opt.best_r2}};
    json subset_log = json::array();
    for (const auto& ev : search.log)
        subset_log.push_back({{"members", ev.indices}, {"r2", ev.r2}});
    metrics_json["subset_search"] = {{"evaluations", search.evaluations},
                                     {"best", search.best},
                                     {"log", std::move(subset_log)}};
    if (!skipped.empty()) metrics_json["skipped_members"] = skipped;

    write_json_file(out / "metrics.json", metrics_json);
    write_text(out / "metrics_heldout.txt", sg::render_metrics_table(held_rows));
    if (!test_rows.empty())
        write_text(out / "metrics_test.txt", sg::render_metrics_table(test_rows));
    echo_config(out, "fit",
                json{{"features", args.features_path},
                     {"knn_k", k},
                     {"trees", args.n_trees},
                     {"depth", args.max_depth},
                     {"min_leaf", args.min_leaf},
                     {"lambda", args.ridge_lambda},
                     {"r2", args.r2_variant},
                     {"subset_size", args.subset_size},
                     {"seed", seed}});

    // optional full-grid prediction raster from the weighted ensemble
    if (!args.pred_out.empty()) {
        if (args.sat_path.empty())
            sg::fail(sg::ErrorKind::Parameter, "--pred-out needs --sat");
        const sg::GeoRaster sat = sg::read_grf(args.sat_path);
        const sg::BandSet bands = sat.band_names().empty()
                                      ? sg::BandSet{}
                                      : sg::BandSet::from_band_names(sat.band_names());
        bands.validate(sat.bands());
        const auto order = bands.ordered();
        sg::GeoRaster pred(sat.width(), sat.height(), 1, sg::DType::F32, sat.transform(),
                           sat.crs(), -9999.0);
        // batch all valid pixels into one matrix, predict once, scatter back
        std::vector<float> rows;
        std::vector<std::size_t> where;
        std::array<float, 10> row{};
        for (std::size_t i = 0; i < sat.pixels(); ++i) {
            bool hole = false;
            for (std::size_t b = 0; b < row.size(); ++b) {
                row[b] = sat.data()[order[b] * sat.pixels() + i];
                if (sat.is_nodata(row[b])) hole = true;
            }
            if (hole) {
                pred.data()[i] = pred.nodata_value();
            } else {
                rows.insert(rows.end(), row.begin(), row.end());
                where.push_back(i);
            }
        }
        const std::vector<float> values = weighted->predict(rows, where.size());
        for (std::size_t k = 0; k < where.size(); ++k) pred.data()[where[k]] = values[k];
        sg::write_grf(pred, args.pred_out);
    }

    std::cout << metrics_json.dump(2) << '\n';
    return 0;
}

struct EvalArgs {
    std::string pred_path, truth_path, out_dir;
    std::string r2_variant = "determination";
};

int run_eval(const EvalArgs& args) {
    const sg::GeoRaster pred = sg::read_raster(args.pred_path);
    const sg::GeoRaster truth = sg::read_raster(args.truth_path);
    if (!pred.same_grid(truth))
        sg::fail(sg::ErrorKind::Alignment, "prediction and truth are not on the same grid");

    std::vector<float> p, t;
    for (std::size_t i = 0; i < pred.pixels(); ++i) {
        const float pv = pred.data()[i], tv = truth.data()[i];
        if (pred.is_nodata(pv) || truth.is_nodata(tv)) continue;
        p.push_back(pv);
        t.push_back(tv);
    }
    const sg::MetricsReport m =
        sg::compute_metrics(p, t, sg::r2_variant_from_name(args.r2_variant));
    const json out = sg::metrics_to_json(m);
    if (!args.out_dir.empty()) {
        write_json_file(std::filesystem::path(args.out_dir) / "eval.json", out);
        echo_config(args.out_dir, "eval",
                    json{{"pred", args.pred_path},
                         {"truth", args.truth_path},
                         {"r2", args.r2_variant}});
    }
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct PlanArgs {
    std::string pred_path, truth_path, out_dir;
    std::string select_pred, select_truth;
    std::string splits_path;
    std::string select_split = "heldout", eval_split = "test";
    std::vector<double> targets;
    std::optional<double> target;
};

int run_plan(const PlanArgs& args) {
    sg::GeoRaster pred = sg::read_raster(args.pred_path);
    sg::GeoRaster truth = sg::read_raster(args.truth_path);

    // figure out where the threshold comes from
    std::optional<std::pair<sg::GeoRaster, sg::GeoRaster>> selection;
    if (!args.splits_path.empty()) {
        const sg::GeoRaster splits = sg::read_grf(args.splits_path);
        const sg::Split sel = sg::split_from_name(args.select_split);
        const sg::Split eval = sg::split_from_name(args.eval_split);
        selection.emplace(sg::mask_by_split(pred, splits, sel),
                          sg::mask_by_split(truth, splits, sel));
        pred = sg::mask_by_split(pred, splits, eval);
        truth = sg::mask_by_split(truth, splits, eval);
    } else if (!args.select_pred.empty()) {
        sg::GeoRaster sp = sg::read_raster(args.select_pred);
        sg::GeoRaster st = args.select_truth.empty() ? truth
                                                     : sg::read_raster(args.select_truth);
        selection.emplace(std::move(sp), std::move(st));
    }

    std::vector<double> targets = args.targets;
    if (targets.empty()) targets = {90, 95, 98, 99};
    if (args.target) targets = {*args.target};

    std::vector<sg::SprayPlan> rows;
    if (selection) {
        const sg::CoverageCurve curve =
            sg::coverage_curve(selection->first, selection->second);
        for (double t : targets) {
            const float threshold = sg::select_threshold(curve, t);
            rows.push_back(sg::make_plan_transfer(pred, truth, t, threshold));
        }
    } else {
        rows = sg::target_sweep(pred, truth, targets);
    }

    json rows_json = json::array();
    for (const auto& plan : rows) rows_json.push_back(sg::plan_to_json(plan));

    if (!args.out_dir.empty()) {
        const std::filesystem::path out = args.out_dir;
        std::filesystem::create_directories(out);
        if (rows.size() == 1) sg::export_plan(rows[0], out);
        write_json_file(out / "sweep.json", rows_json);
        write_text(out / "sweep.txt", sg::render_sweep_table(rows));
        write_text(out / "sweep.csv", sg::sweep_csv(rows));
        echo_config(out, "plan",
                    json{{"pred", args.pred_path},
                         {"truth", args.truth_path},
                         {"select_pred", args.select_pred},
                         {"select_truth", args.select_truth},
                         {"splits", args.splits_path},
                         {"select_split", args.select_split},
                         {"eval_split", args.eval_split},
                         {"targets", targets}});
    }

    std::cout << (rows.size() == 1 ? sg::plan_to_json(rows[0]) : rows_json).dump(2) << '\n';
    std::cerr << sg::render_sweep_table(rows);
    return 0;
}

struct ReportArgs {
    std::string registry_dir, out_dir, plot_path, csv_path;
    std::string architecture;
    std::string truth_path, splits_path;
    int target = 99;
    bool best_per_loss = false;
};

int run_report(const ReportArgs& args) {
    std::optional<sg::GeoRaster> truth, splits;
    sg::IngestContext ctx;
    const bool recompute = !args.truth_path.empty();
    if (recompute) {
        if (args.splits_path.empty())
            sg::fail(sg::ErrorKind::Parameter, "recomputation needs --splits with --truth");
        truth = sg::read_raster(args.truth_path);
        splits = sg::read_grf(args.splits_path);
        ctx.truth = &*truth;
        ctx.splits = &*splits;
    }

    const std::vector<sg::ModelRecord> records =
        sg::load_registry(args.registry_dir, recompute ? &ctx : nullptr);
    const sg::SweepReport report =
        args.best_per_loss ? sg::best_per_loss(records, args.target, args.architecture)
                           : sg::sweep_report(records, args.target);

    if (!args.plot_path.empty()) write_text(args.plot_path, sg::landscape_svg(report));
    if (!args.csv_path.empty()) write_text(args.csv_path, sg::landscape_csv(report));
    if (!args.out_dir.empty()) {
        const std::filesystem::path out = args.out_dir;
        write_json_file(out / "report.json", sg::report_to_json(report));
        write_text(out / "report.txt", sg::render_report_table(report));
        echo_config(out, "report",
                    json{{"registry", args.registry_dir},
                         {"target", args.target},
                         {"best_per_loss", args.best_per_loss},
                         {"architecture", args.architecture}});
    }

    std::cout << sg::report_to_json(report).dump(2) << '\n';
    std::cerr << sg::render_report_table(report);
    return 0;
}

struct CompositeArgs {
    std::string sat_path, out_path, png_path;
    std::string r = "nir", g = "green", b = "vre2";
    std::vector<double> bounds; // r_lo,r_hi,g_lo,g_hi,b_lo,b_hi
};

int run_composite(const CompositeArgs& args) {
    const sg::GeoRaster sat = sg::read_grf(args.sat_path);
    const sg::BandSet bands = sat.band_names().empty()
                                  ? sg::BandSet{}
                                  : sg::BandSet::from_band_names(sat.band_names());
    sg::CompositeMapping mapping;
    mapping.r = args.r;
    mapping.g = args.g;
    mapping.b = args.b;

    std::optional<std::array<sg::StretchBounds, 3>> bounds;
    if (!args.bounds.empty()) {
        if (args.bounds.size() != 6)
            sg::fail(sg::ErrorKind::Parameter,
                     "--bounds wants 6 values: r_lo,r_hi,g_lo,g_hi,b_lo,b_hi");
        bounds = {{{args.bounds[0], args.bounds[1]},
                   {args.bounds[2], args.bounds[3]},
                   {args.bounds[4], args.bounds[5]}}};
    }

    const sg::GeoRaster rgb = sg::false_color_composite(sat, bands, mapping, bounds);
    if (!args.out_path.empty()) sg::write_grf(rgb, args.out_path);
    if (!args.png_path.empty()) sg::write_rgb_png(rgb, args.png_path);

    json summary{{"grf", args.out_path},
                 {"png", args.png_path},
                 {"mapping", {{"r", args.r}, {"g", args.g}, {"b", args.b}}}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spraygrid: weed-fraction rasters, regression ensembles and spray planning"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 ok, 2 usage, 3 io, 4 schema, 5 parameter/validation,\n"
        "            6 grid/CRS mismatch, 7 infeasible, 8 solver, 9 integrity.\n"
        "SPRAYGRID_SEED provides the seed when --seed is absent.");

    int threads = 4;
    app.add_option("--threads", threads, "Max worker threads (results are thread-count independent)");

    SynthArgs synth;
    auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic field");
    cmd_synth->add_option("--spec", synth.spec_path, "FieldSpec JSON (defaults when omitted)");
    cmd_synth->add_option("--out", synth.out_dir, "Output directory")->required();
    cmd_synth->add_option("--seed", synth.seed, "Seed override");

    SoftmaskArgs softmask;
    auto* cmd_softmask = app.add_subcommand("softmask", "Aggregate a drone mask into weed fractions");
    cmd_softmask->add_option("--mask", softmask.mask_path, "Drone mask (.grf or .png)")->required();
    cmd_softmask->add_option("--factor", softmask.factor, "Aggregation factor (drone px per satellite px)");
    cmd_softmask->add_option("--out", softmask.out_dir, "Output directory")->required();

    FeaturesArgs features;
    auto* cmd_features = app.add_subcommand("features", "Build the per-pixel feature table");
    cmd_features->add_option("--sat", features.sat_path, "10-band satellite raster")->required();
    cmd_features->add_option("--truth", features.truth_path, "Fraction-mask target raster")->required();
    cmd_features->add_option("--splits", features.splits_path, "Existing split raster (else generated)");
    cmd_features->add_option("--split-fractions", features.split_fractions,
                             "train,heldout,test fractions")->expected(3)->delimiter(',');
    cmd_features->add_option("--split-block", features.split_block, "Split tile size in satellite pixels");
    cmd_features->add_option("--seed", features.seed, "Seed for the split shuffle");
    cmd_features->add_option("--out", features.out_dir, "Output directory")->required();

    FitArgs fit;
    auto* cmd_fit = app.add_subcommand("fit", "Fit regressors and the voting ensemble");
    cmd_fit->add_option("--features", fit.features_path, "Feature CSV or .bin cache")->required();
    cmd_fit->add_option("--out", fit.out_dir, "Output directory")->required();
    cmd_fit->add_option("--knn-k", fit.knn_k, "k for the nearest-neighbour member");
    cmd_fit->add_option("--trees", fit.n_trees, "Tree count for the randomized ensemble");
    cmd_fit->add_option("--depth", fit.max_depth, "Max tree depth");
    cmd_fit->add_option("--min-leaf", fit.min_leaf, "Min samples per leaf");
    cmd_fit->add_option("--lambda", fit.ridge_lambda, "Ridge penalty");
    cmd_fit->add_option("--r2", fit.r2_variant, "R2 variant: determination|pearson");
    cmd_fit->add_option("--subset-size", fit.subset_size, "Ensemble subset size");
    cmd_fit->add_option("--seed", fit.seed, "Seed for stochastic fits");
    cmd_fit->add_option("--sat", fit.sat_path, "Satellite raster for --pred-out");
    cmd_fit->add_option("--pred-out", fit.pred_out, "Write a full-grid prediction raster (.grf)");

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "Regression metrics between two rasters");
    cmd_eval->add_option("--pred", eval.pred_path, "Prediction raster")->required();
    cmd_eval->add_option("--truth", eval.truth_path, "Truth raster")->required();
    cmd_eval->add_option("--r2", eval.r2_variant, "R2 variant: determination|pearson");
    cmd_eval->add_option("--out", eval.out_dir, "Optional output directory");

    PlanArgs plan;
    auto* cmd_plan = app.add_subcommand("plan", "Threshold selection and spray planning");
    cmd_plan->add_option("--pred", plan.pred_path, "Prediction raster")->required();
    cmd_plan->add_option("--truth", plan.truth_path, "Annotation raster")->required();
    cmd_plan->add_option("--target", plan.target, "Single coverage target (percent)");
    cmd_plan->add_option("--targets", plan.targets, "Sweep targets (percent)")->delimiter(',');
    cmd_plan->add_option("--select-on,--select-pred", plan.select_pred,
                         "Prediction raster for threshold selection (transfer mode)");
    cmd_plan->add_option("--select-truth", plan.select_truth,
                         "Truth raster for threshold selection (defaults to --truth)");
    cmd_plan->add_option("--splits", plan.splits_path,
                         "Split raster: select on one split, evaluate on another");
    cmd_plan->add_option("--select-split", plan.select_split, "Split used for selection");
    cmd_plan->add_option("--eval-split", plan.eval_split, "Split used for evaluation");
    cmd_plan->add_option("--out", plan.out_dir, "Output directory");

    ReportArgs report;
    auto* cmd_report = app.add_subcommand("report", "Model registry reports and plots");
    cmd_report->add_option("--registry", report.registry_dir, "Registry directory")->required();
    cmd_report->add_option("--target", report.target, "Primary coverage target");
    cmd_report->add_option("--plot", report.plot_path, "Write the landscape SVG here");
    cmd_report->add_option("--csv", report.csv_path, "Write the landscape CSV here");
    cmd_report->add_flag("--best-per-loss", report.best_per_loss, "best model per loss function");
    cmd_report->add_option("--architecture", report.architecture, "Architecture filter");
    cmd_report->add_option("--truth", report.truth_path, "Truth raster for recomputation");
    cmd_report->add_option("--splits", report.splits_path, "Split raster for recomputation");
    cmd_report->add_option("--out", report.out_dir, "Output directory");

    CompositeArgs composite;
    auto* cmd_composite = app.add_subcommand("composite", "False-color composite (nir/green/vre2)");
    cmd_composite->add_option("--sat", composite.sat_path, "10-band satellite raster")->required();
    cmd_composite->add_option("--out", composite.out_path, "Composite raster (.grf)");
    cmd_composite->add_option("--png", composite.png_path, "Composite PNG");
    cmd_composite->add_option("--r", composite.r, "Band role for the red channel");
    cmd_composite->add_option("--g", composite.g, "Band role for the green channel");
    cmd_composite->add_option("--b", composite.b, "Band role for the blue channel");
    cmd_composite->add_option("--bounds", composite.bounds,
                              "Stretch bounds r_lo,r_hi,g_lo,g_hi,b_lo,b_hi")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    sg::set_thread_cap(threads);
    try {
        if (cmd_synth->parsed()) return run_synth(synth);
        if (cmd_softmask->parsed()) return run_softmask(softmask);
        if (cmd_features->parsed()) return run_features(features);
        if (cmd_fit->parsed()) return run_fit(fit);
        if (cmd_eval->parsed()) return run_eval(eval);
        if (cmd_plan->parsed()) return run_plan(plan);
        if (cmd_report->parsed()) return run_report(report);
        if (cmd_composite->parsed()) return run_composite(composite);
    } catch (const sg::Error& e) {
        const int code = exit_code_for(e.kind());
        json err{{"error",
                  {{"kind", sg::error_kind_name(e.kind())},
                   {"message", e.what()},
                   {"exit_code", code}}}};
        std::cout << err.dump(2) << '\n';
        std::cerr << "error (" << sg::error_kind_name(e.kind()) << "): " << e.what() << '\n';
        return code;
    } catch (const std::exception& e) {
        json err{{"error", {{"kind", "internal"}, {"message", e.what()}, {"exit_code", 1}}}};
        std::cout << err.dump(2) << '\n';
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
