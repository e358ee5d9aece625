// SPDX-License-Identifier: MIT
//
// fanova: purify additive models with interactions into their functional
// ANOVA form.
//
//   fanova purify  --model m.json --weights uniform --out pure.json
//   fanova purify  --ensemble trees.json --weights laplace --data train.csv
//   fanova check   --model pure.json --weights empirical --data train.csv
//   fanova gen     --fig1-row a | --wright NAME | --lambda L | --multiplicative | --sigma S --dims P
//   fanova bench   --sigma 1,10,100 --dims 2,25,100 --weights random --trials 100
//   fanova density --model m.json --weights laplace --data train.csv
//   fanova predict --model m.json --data rows.csv
//
// JSON goes to stdout when --out is omitted; errors go to stderr as one JSON
// object. Exit codes: 0 ok, 1 bad input, 2 I/O failure, 3 non-convergence,
// 4 degenerate slice under --strict, 5 purity check failed.

#include "fanova/fanova.hpp"
#include "fanova/io.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace fanova;

enum ExitCode : int {
    kOk = 0,
    kBadInput = 1,
    kIoFailure = 2,
    kNonConvergence = 3,
    kDegenerate = 4,
    kImpure = 5,
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

template <typename Fn>
std::string render(Fn&& fn) {
    std::ostringstream out;
    fn(out);
    return out.str();
}

AdditiveModel load_model(const std::string& path) {
    std::istringstream in(read_text(path));
    return read_model_json(in);
}

struct WeightArgs {
    std::string mode = "uniform";
    std::string data;
    std::string density;
    bool laplace_mixture = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--weights", mode, "Cell-weight density: uniform, empirical or laplace");
        cmd->add_option("--data", data, "Training data CSV (empirical / laplace)");
        cmd->add_option("--density", density, "Read weights from a density JSON instead of estimating them");
        cmd->add_flag("--laplace-mixture", laplace_mixture, "Laplace as 0.5 uniform + 0.5 empirical");
    }

    WeightDensity build(const AdditiveModel& model) const {
        if (!density.empty()) {
            std::istringstream in(read_text(density));
            return read_density_json(in);
        }
        DensitySpec spec;
        spec.mode = parse_density_mode(mode);
        spec.laplace_mixture = laplace_mixture;
        if (spec.mode != DensityMode::uniform) {
            if (data.empty()) throw DomainError("--weights " + mode + " requires --data");
            std::istringstream in(read_text(data));
            spec.data = read_data_csv(in, model.bins());
        }
        return estimate_density(model, spec);
    }
};

struct PurifyArgs {
    std::string model;
    std::string ensemble;
    WeightArgs weights;
    double tol = 1e-12;
    std::optional<std::size_t> max_passes;
    bool strict = false;
    double check_tol = 1e-10;
    std::string out;
    std::string report;
    std::string purity;
};

int run_purify(const PurifyArgs& a) {
    if (!a.model.empty() && !a.ensemble.empty()) throw DomainError("give either --model or --ensemble, not both");
    AdditiveModel model;
    if (!a.ensemble.empty()) {
        std::istringstream in(read_text(a.ensemble));
        model = ingest_ensemble(read_ensemble_json(in));
    } else {
        model = load_model(a.model.empty() ? "-" : a.model);
    }
    const WeightDensity w = a.weights.build(model);
    PurifyOptions options;
    options.tol = a.tol;
    options.max_passes = a.max_passes;
    options.degenerate = a.strict ? DegeneratePolicy::strict : DegeneratePolicy::skip;

    auto result = purify_model(std::move(model), w, options);
    const auto purity = check_purity(result.model, w, a.check_tol);

    write_text(a.out, model_to_json(result.model));
    if (!a.report.empty()) {
        write_text(a.report, render([&](std::ostream& o) { write_convergence_csv(o, result.reports); }));
    }
    if (!a.purity.empty()) {
        write_text(a.purity, render([&](std::ostream& o) { write_purity_json(o, purity); }));
    }
    return kOk;
}

int run_check(const std::string& model_path, const WeightArgs& weights, double tol, const std::string& out) {
    const AdditiveModel model = load_model(model_path.empty() ? "-" : model_path);
    const auto report = check_purity(model, weights.build(model), tol);
    write_text(out, render([&](std::ostream& o) { write_purity_json(o, report); }));
    return report.pass ? kOk : kImpure;
}

struct GenArgs {
    std::string fig1_row;
    std::string wright;
    std::optional<double> lambda;
    bool multiplicative = false;
    MultiplicativeParams mult;
    std::size_t grid = 64;
    std::optional<double> sigma;
    std::optional<std::size_t> dims;
    std::string weights = "uniform";
    std::uint64_t seed = 0;
    std::string out;
    std::string density_out;
};

int run_gen(const GenArgs& a) {
    const int chosen = int(!a.fig1_row.empty()) + int(!a.wright.empty()) + int(a.lambda.has_value()) +
                       int(a.multiplicative) + int(a.sigma.has_value() || a.dims.has_value());
    if (chosen != 1) {
        throw DomainError("gen needs exactly one of --fig1-row, --wright, --lambda, --multiplicative, --sigma/--dims");
    }
    if (a.sigma || a.dims) {
        if (!a.sigma || !a.dims) throw DomainError("random bench generation needs both --sigma and --dims");
        const auto bench = gen_random_bench(*a.sigma, *a.dims, parse_bench_weights(a.weights), a.seed);
        write_text(a.out, model_to_json(bench.model));
        if (!a.density_out.empty()) {
            write_text(a.density_out, render([&](std::ostream& o) { write_density_json(o, bench.weights, a.weights); }));
        }
        return kOk;
    }
    AdditiveModel model;
    if (!a.fig1_row.empty()) {
        model = gen_boolean_fig1(parse_fig1_row(a.fig1_row));
    } else if (!a.wright.empty()) {
        model = gen_wright(a.wright);
    } else if (a.lambda) {
        model = gen_log_lambda(*a.lambda, a.grid);
    } else {
        model = gen_multiplicative(a.mult, a.grid);
    }
    write_text(a.out, model_to_json(model));
    return kOk;
}

struct BenchArgs {
    std::vector<double> sigmas{1.0};
    std::vector<std::size_t> dims{100};
    std::string weights = "uniform";
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    double tol = 1e-12;
    std::optional<std::size_t> max_passes;
    std::string out;
};

int run_bench(const BenchArgs& a) {
    const BenchWeights mode = parse_bench_weights(a.weights);
    PurifyOptions options;
    options.tol = a.tol;
    options.max_passes = a.max_passes;
    std::ostringstream csv;
    csv << "sigma,dims,seed,iteration,mass,terminated_by\n";
    bool converged = true;
    for (double sigma : a.sigmas) {
        for (std::size_t p : a.dims) {
            for (std::size_t trial = 0; trial < a.trials; ++trial) {
                const std::uint64_t seed = a.seed + trial;
                const auto bench = gen_random_bench(sigma, p, mode, seed);
                ConvergenceReport report;
                try {
                    report = purify_tensor(bench.model, RandomBench::vars(), bench.weights, options).report;
                } catch (const NonConvergence& e) {
                    report = e.report();
                    converged = false;
                }
                for (const auto& s : report.trace) {
                    csv << format_number(sigma) << ',' << p << ',' << seed << ',' << s.iteration << ','
                        << format_number(s.mass) << ',' << to_string(report.terminated_by) << '\n';
                }
            }
        }
    }
    write_text(a.out, csv.str());
    return converged ? kOk : kNonConvergence;
}

int run_density(const std::string& model_path, const WeightArgs& weights, const std::string& out) {
    const AdditiveModel model = load_model(model_path.empty() ? "-" : model_path);
    const WeightDensity w = weights.build(model);
    const std::string mode = weights.density.empty() ? weights.mode : "file";
    write_text(out, render([&](std::ostream& o) { write_density_json(o, w, mode); }));
    return kOk;
}

int run_predict(const std::string& model_path, const std::string& data_path, const std::string& out) {
    if (data_path.empty()) throw DomainError("predict requires --data");
    const AdditiveModel model = load_model(model_path.empty() ? "-" : model_path);
    std::istringstream in(read_text(data_path));
    const GridDataset data = read_data_csv(in, model.bins());
    std::vector<double> predictions;
    predictions.reserve(data.size());
    for (std::size_t r = 0; r < data.size(); ++r) {
        try {
            predictions.push_back(predict(model, data.point(r)));
        } catch (const DomainError& e) {
            throw DomainError("data row " + std::to_string(r) + ": " + e.what());
        }
    }
    write_text(out, render([&](std::ostream& o) { write_predictions_csv(o, predictions); }));
    return kOk;
}

int report_error(const std::string& kind, const std::string& message, int code) {
    Json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Purify additive models with interaction effects into functional ANOVA form", "fanova"};
    app.require_subcommand(1);

    PurifyArgs purify;
    auto* cmd_purify = app.add_subcommand("purify", "Purify a model or tree ensemble");
    cmd_purify->add_option("--model", purify.model, "Model JSON ('-' or omitted: stdin)");
    cmd_purify->add_option("--ensemble", purify.ensemble, "Tree ensemble JSON to ingest instead of a model");
    purify.weights.attach(cmd_purify);
    cmd_purify->add_option("--tol", purify.tol, "Target |weighted slice mean| per tensor")->check(CLI::PositiveNumber);
    cmd_purify->add_option("--max-passes", purify.max_passes, "Full passes allowed per tensor");
    cmd_purify->add_flag("--strict", purify.strict, "Fail on zero-weight slices instead of skipping them");
    cmd_purify->add_option("--check-tol", purify.check_tol, "Tolerance of the purity report");
    cmd_purify->add_option("--out", purify.out, "Purified model JSON (default stdout)");
    cmd_purify->add_option("--report", purify.report, "Convergence trace CSV");
    cmd_purify->add_option("--purity", purify.purity, "Purity report JSON");

    std::string check_model, check_out;
    WeightArgs check_weights;
    double check_tol = 1e-10;
    auto* cmd_check = app.add_subcommand("check", "Report the largest weighted slice mean of each tensor");
    cmd_check->add_option("--model", check_model, "Model JSON ('-' or omitted: stdin)");
    check_weights.attach(cmd_check);
    cmd_check->add_option("--tol", check_tol, "Pass threshold on |slice mean|");
    cmd_check->add_option("--out", check_out, "Purity report JSON (default stdout)");

    GenArgs gen;
    auto* cmd_gen = app.add_subcommand("gen", "Write a synthetic model");
    cmd_gen->add_option("--fig1-row", gen.fig1_row, "Boolean example row: a, b, c or d");
    cmd_gen->add_option("--wright", gen.wright, "SNP generator name, e.g. \"No Interaction\"");
    cmd_gen->add_option("--lambda", gen.lambda, "(1 - lambda) log(x1 x2) + lambda x1 x2");
    cmd_gen->add_flag("--multiplicative", gen.multiplicative, "a + b x1 + c x2 + d x1 x2 in shifted form");
    cmd_gen->add_option("--a", gen.mult.a);
    cmd_gen->add_option("--b", gen.mult.b);
    cmd_gen->add_option("--c", gen.mult.c);
    cmd_gen->add_option("--d", gen.mult.d);
    cmd_gen->add_option("--alpha", gen.mult.alpha);
    cmd_gen->add_option("--beta", gen.mult.beta);
    cmd_gen->add_option("--grid", gen.grid, "Cells per axis for continuous generators");
    cmd_gen->add_option("--sigma", gen.sigma, "Random bench: entry standard deviation");
    cmd_gen->add_option("--dims", gen.dims, "Random bench: matrix size P");
    cmd_gen->add_option("--weights", gen.weights, "Random bench weights: uniform or random");
    cmd_gen->add_option("--seed", gen.seed, "Random bench seed");
    cmd_gen->add_option("--out", gen.out, "Model JSON (default stdout)");
    cmd_gen->add_option("--density-out", gen.density_out, "Random bench density JSON");

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "Trace the unpurified mass on random matrices");
    cmd_bench->add_option("--sigma", bench.sigmas, "Entry standard deviations")->delimiter(',');
    cmd_bench->add_option("--dims", bench.dims, "Matrix sizes P")->delimiter(',');
    cmd_bench->add_option("--weights", bench.weights, "uniform or random");
    cmd_bench->add_option("--seed", bench.seed, "First seed; trial k uses seed + k");
    cmd_bench->add_option("--trials", bench.trials, "Draws per (sigma, P)");
    cmd_bench->add_option("--tol", bench.tol)->check(CLI::PositiveNumber);
    cmd_bench->add_option("--max-passes", bench.max_passes);
    cmd_bench->add_option("--out", bench.out, "Trace CSV (default stdout)");

    std::string density_model, density_out;
    WeightArgs density_weights;
    auto* cmd_density = app.add_subcommand("density", "Write the estimated cell weights");
    cmd_density->add_option("--model", density_model, "Model JSON ('-' or omitted: stdin)");
    density_weights.attach(cmd_density);
    cmd_density->add_option("--out", density_out, "Density JSON (default stdout)");

    std::string predict_model, predict_data, predict_out;
    auto* cmd_predict = app.add_subcommand("predict", "Evaluate a model on CSV rows");
    cmd_predict->add_option("--model", predict_model, "Model JSON ('-' or omitted: stdin)");
    cmd_predict->add_option("--data", predict_data, "Rows to evaluate (CSV with header)");
    cmd_predict->add_option("--out", predict_out, "Predictions CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", e.what(), kBadInput);
    }

    try {
        if (*cmd_purify) return run_purify(purify);
        if (*cmd_check) return run_check(check_model, check_weights, check_tol, check_out);
        if (*cmd_gen) return run_gen(gen);
        if (*cmd_bench) return run_bench(bench);
        if (*cmd_density) return run_density(density_model, density_weights, density_out);
        if (*cmd_predict) return run_predict(predict_model, predict_data, predict_out);
    } catch (const NonConvergence& e) {
        return report_error("non_convergence", e.what(), kNonConvergence);
    } catch (const DegenerateSlice& e) {
        return report_error("degenerate_slice", e.what(), kDegenerate);
    } catch (const IoError& e) {
        return report_error("io", e.what(), kIoFailure);
    } catch (const DomainError& e) {
        return report_error("domain", e.what(), kBadInput);
    } catch (const std::exception& e) {
        return report_error("internal", e.what(), kBadInput);
    }
    return kBadInput;
}
