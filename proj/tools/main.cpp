#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sfspline/csv.hpp"
#include "sfspline/design.hpp"
#include "sfspline/errors.hpp"
#include "sfspline/harness.hpp"
#include "sfspline/model_io.hpp"
#include "sfspline/selection.hpp"
#include "sfspline/solver.hpp"
#include "sfspline/transform.hpp"

namespace {

using namespace sfs;

void add_design(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "design", "Generate q space-filling design points in [0,1)^d");
    auto method = std::make_shared<std::string>("sobol");
    auto q = std::make_shared<Index>(0);
    auto d = std::make_shared<Index>(0);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out = std::make_shared<std::string>();
    sub->add_option("--method", *method, "sobol | lhs | grid")
        ->capture_default_str();
    sub->add_option("--q", *q, "number of points")->required();
    sub->add_option("--d", *d, "dimension (Sobol table covers up to 10)")
        ->required();
    sub->add_option("--seed", *seed, "seed (used by lhs)")->capture_default_str();
    sub->add_option("--out", *out, "output CSV with header x1..xd")->required();
    sub->callback([=] {
        const DesignPointSet set =
            generate_design(design_method_from_string(*method), *q, *d, *seed);
        std::vector<std::string> header;
        for (Index j = 1; j <= *d; ++j) header.push_back("x" + std::to_string(j));
        write_csv(*out, header, set.points);
        std::cerr << "wrote " << set.points.rows() << " points to " << *out
                  << "\n";
    });
}

void add_discrepancy(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "discrepancy", "Star discrepancy of a point set (prints the value)");
    auto input = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("exact");
    auto seed = std::make_shared<std::uint64_t>(0);
    sub->add_option("--input", *input, "points CSV with header x1..xd")
        ->required();
    sub->add_option("--mode", *mode,
                    "exact | approx (approx reports a lower bound)")
        ->capture_default_str();
    sub->add_option("--seed", *seed, "seed for the approx corner sample")
        ->capture_default_str();
    sub->callback([=] {
        const Matrix pts = table_to_points(read_csv(*input));
        const DiscrepancyMode m = *mode == "exact" ? DiscrepancyMode::exact
                                : *mode == "approx"
                                    ? DiscrepancyMode::approximate
                                    : throw invalid_input(
                                          "mode must be exact or approx");
        const StarDiscrepancy res = star_discrepancy(pts, m, *seed);
        std::printf("%.17g\n", res.value);
        if (res.is_lower_bound)
            std::cerr << "note: approximate mode; the exact value is >= this\n";
    });
}

void add_select(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "select", "Select basis rows from a dataset (rank-transformed first)");
    auto input = std::make_shared<std::string>();
    auto method = std::make_shared<std::string>("sbs");
    auto q_rule = std::make_shared<std::string>("5*n^(2/9)");
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out = std::make_shared<std::string>();
    sub->add_option("--input", *input, "CSV with header x1..xd,y")->required();
    sub->add_option("--method", *method, "sbs | abs | unif")
        ->capture_default_str();
    sub->add_option("--q-rule", *q_rule, "q as a rule in n, e.g. \"5*n^(2/9)\"")
        ->capture_default_str();
    sub->add_option("--seed", *seed, "selection seed")->capture_default_str();
    sub->add_option("--out", *out, "output CSV with the selected row indices")
        ->required();
    sub->callback([=] {
        const RawTable raw = table_to_raw(read_csv(*input));
        const Dataset data = to_unit_cube(raw);
        const Index q = essential_q(parse_q_rule(*q_rule), raw.rows());
        const BasisSelection sel = select_basis(
            data, selection_method_from_string(*method), q, *seed);
        Matrix idx(sel.q_eff(), 1);
        for (Index i = 0; i < sel.q_eff(); ++i)
            idx(i, 0) = static_cast<double>(sel.indices[static_cast<std::size_t>(i)]);
        write_csv(*out, {"index"}, idx);
        std::cerr << "selected " << sel.q_eff() << " of " << q
                  << " requested rows\n";
    });
}

void add_fit(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "fit",
        "Rank-transform a dataset, select basis rows, fit by penalized least "
        "squares (lambda from GCV unless --lambda is given), save the model");
    auto input = std::make_shared<std::string>();
    auto kernel = std::make_shared<std::string>("ssanova");
    auto method = std::make_shared<std::string>("sbs");
    auto q_rule = std::make_shared<std::string>("5*n^(2/9)");
    auto seed = std::make_shared<std::uint64_t>(0);
    auto model_path = std::make_shared<std::string>();
    auto lambda = std::make_shared<double>(0.0);
    sub->add_option("--input", *input, "CSV with header x1..xd,y")->required();
    sub->add_option("--kernel", *kernel, "cubic | ssanova | tps")
        ->capture_default_str();
    sub->add_option("--method", *method, "sbs | abs | unif")
        ->capture_default_str();
    sub->add_option("--q-rule", *q_rule, "q as a rule in n")
        ->capture_default_str();
    sub->add_option("--seed", *seed, "selection seed")->capture_default_str();
    sub->add_option("--model", *model_path, "output model file")->required();
    sub->add_option("--lambda", *lambda,
                    "fix the smoothing parameter instead of running GCV");
    sub->callback([=] {
        const RawTable raw = table_to_raw(read_csv(*input));
        const Dataset data = to_unit_cube(raw);
        const KernelSpec spec = kernel_spec_from_string(*kernel, raw.dims());
        const Index q = essential_q(parse_q_rule(*q_rule), raw.rows());
        const BasisSelection sel = select_basis(
            data, selection_method_from_string(*method), q, *seed);
        FittedSpline fit;
        if (*lambda > 0.0) {
            fit = fit_restricted(data, sel, spec, *lambda);
        } else {
            fit = gcv_select(data, sel, spec).fit;
        }
        save_model(*model_path, fit);
        std::cerr << "lambda=" << fit.lambda << " edf=" << fit.diag.edf
                  << " gcv=" << fit.diag.gcv << " q_eff=" << fit.diag.q_eff
                  << "\n";
    });
}

void add_predict(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "predict",
        "Evaluate a saved model at points given in the transformed unit-cube "
        "scale (use grid-predict for raw-coordinate grids)");
    auto model_path = std::make_shared<std::string>();
    auto points = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    sub->add_option("--model", *model_path, "model file from fit")->required();
    sub->add_option("--points", *points, "CSV with header x1..xd, values in [0,1]")
        ->required();
    sub->add_option("--out", *out, "output CSV with column yhat")->required();
    sub->callback([=] {
        const FittedSpline model = load_model(*model_path);
        const Matrix pts = table_to_points(read_csv(*points));
        const Vector yhat = predict(model, pts);
        Matrix col(yhat.size(), 1);
        col.col(0) = yhat;
        write_csv(*out, {"yhat"}, col);
        std::cerr << "wrote " << yhat.size() << " predictions to " << *out
                  << "\n";
    });
}

void add_simulate(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "simulate", "Run the replicated simulation benchmark, write a results CSV");
    // Expanded into flags up front (see expand_config); declared here so the
    // option parses cleanly and shows up in --help.
    sub->add_option("--config",
                    "config file with key=value lines named after the long "
                    "flags; explicit flags override it");
    auto cfg = std::make_shared<SimulationConfig>();
    auto methods = std::make_shared<std::vector<std::string>>(
        std::vector<std::string>{"sbs", "abs", "unif"});
    auto out = std::make_shared<std::string>();
    cfg->q_rules = {"5*n^(2/9)"};
    sub->add_option("--setting", cfg->setting, "regression setting 1..4")
        ->required();
    sub->add_option("--snr", cfg->snr, "signal-to-noise ratio")
        ->capture_default_str();
    sub->add_option("--n", cfg->sizes, "sample sizes, comma separated")
        ->required()
        ->delimiter(',');
    sub->add_option("--q-rule", cfg->q_rules,
                    "q rules in n, comma separated")
        ->capture_default_str()
        ->delimiter(',');
    sub->add_option("--methods", *methods, "subset of sbs,abs,unif")
        ->capture_default_str()
        ->delimiter(',');
    sub->add_option("--reps", cfg->replicates, "replicates per cell")
        ->capture_default_str();
    sub->add_option("--seed", cfg->seed, "master seed")->capture_default_str();
    sub->add_option("--test-size", cfg->test_size, "test points per replicate")
        ->capture_default_str();
    sub->add_option("--out", *out, "results CSV path")->required();
    sub->callback([=] {
        cfg->methods.clear();
        for (const std::string& name : *methods)
            cfg->methods.push_back(selection_method_from_string(name));
        const std::vector<ResultRow> rows = run_simulation(*cfg);
        write_results_csv(*out, rows);
        std::cerr << "wrote " << rows.size() << " result rows to " << *out
                  << "\n";
    });
}

void add_grid_predict(CLI::App& app) {
    auto* sub = app.add_subcommand(
        "grid-predict",
        "Ingest a raw CSV, fit, and predict on the regular grid spanning the "
        "observed bounding box");
    auto cfg = std::make_shared<GridPredictConfig>();
    sub->add_option("--input", cfg->input_path, "CSV with header x1..xd,y")
        ->required();
    sub->add_option("--out", cfg->output_path, "output grid CSV")->required();
    sub->add_option("--step", cfg->step, "grid step in raw units")
        ->capture_default_str();
    sub->add_option("--kernel", cfg->kernel, "cubic | ssanova | tps")
        ->capture_default_str();
    sub->add_option("--q-rule", cfg->q_rule, "q as a rule in n")
        ->capture_default_str();
    sub->add_option("--method", cfg->method, "sbs | abs | unif")
        ->capture_default_str();
    sub->add_option("--seed", cfg->seed, "selection seed")->capture_default_str();
    sub->callback([=] {
        const Index rows = ingest_csv_and_grid_predict(*cfg);
        std::cerr << "wrote " << rows << " grid rows to " << cfg->output_path
                  << "\n";
    });
}

// CLI11 (as vendored) only reads config files attached to the top-level
// command, so `simulate --config FILE` is expanded by hand: each key=value
// line becomes the matching --key flag.  Keys the user already passed
// explicitly are skipped, which is what makes flags override the file.
void expand_config(std::vector<std::string>& args) {
    if (args.empty() || args.front() != "simulate") return;
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(std::string("--config=").size());
    }
    if (path.empty()) return;

    std::ifstream stream(path);
    if (!stream)
        throw io_error("cannot open config file '" + path + "'");
    const std::vector<CLI::ConfigItem> items =
        CLI::ConfigINI{}.from_config(stream);

    const std::size_t explicit_count = args.size();
    const auto given_explicitly = [&](const std::string& flag) {
        for (std::size_t i = 1; i < explicit_count; ++i)
            if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0)
                return true;
        return false;
    };
    for (const CLI::ConfigItem& item : items) {
        if (!item.parents.empty())
            throw invalid_input("config file '" + path +
                                "': sections are not supported");
        const std::string flag = "--" + item.name;
        if (given_explicitly(flag)) continue;
        args.push_back(flag);
        args.insert(args.end(), item.inputs.begin(), item.inputs.end());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Smoothing-spline regression with space-filling basis selection"};
    app.require_subcommand(1);
    add_design(app);
    add_discrepancy(app);
    add_select(app);
    add_fit(app);
    add_predict(app);
    add_simulate(app);
    add_grid_predict(app);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        expand_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const sfs::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
