// Command-line front end: compare two embedding files, export frontier
// curves, run the synthetic error study, or dump quantized histograms.
//
// Exit codes: 0 ok, 2 I/O or parse error, 3 configuration error,
// 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "dfe/dfe.hpp"

namespace {

using nlohmann::json;

struct RunConfig {
    std::string estimator = "quantize";
    std::string divergence = "kl";
    std::optional<double> lambda;
    std::string summary = "all";
    std::size_t k = 500;
    std::string smoothing = "kt";
    double c = 5.0;
    int grid_size = 100;
    int pca_dims = 25;
    int gaussian_pca_dims = 10;
    int knn_k = 0;  // 0 = ceil(n^{1/3})
    double bandwidth = 1.0;
    std::size_t mc_samples = 100000;
    std::optional<double> epsilon;
    std::optional<std::uint64_t> seed;
    std::string output_format = "json";
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_common_flags(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--estimator", config.estimator,
                    "quantize | knn | kde | classifier | gaussian | ot");
    cmd->add_option("--divergence", config.divergence, "divergence generator name");
    cmd->add_option("--lambda", config.lambda, "lambda for parameterized generators");
    cmd->add_option("--summary", config.summary, "all | mauve | fi | mid");
    cmd->add_option("--k", config.k, "quantization buckets");
    cmd->add_option("--smoothing", config.smoothing, "none|laplace|kt|braess_sauer|good_turing");
    cmd->add_option("--c", config.c, "MAUVE scaling constant");
    cmd->add_option("--grid-size", config.grid_size, "lambda grid size N");
    cmd->add_option("--pca-dims", config.pca_dims, "PCA dims for knn/kde/classifier");
    cmd->add_option("--gaussian-pca-dims", config.gaussian_pca_dims,
                    "PCA dims for the gaussian estimator");
    cmd->add_option("--knn-k", config.knn_k, "neighbor count (0 = ceil(n^{1/3}))");
    cmd->add_option("--bandwidth", config.bandwidth, "KDE bandwidth");
    cmd->add_option("--mc-samples", config.mc_samples, "MC samples for gaussian estimator");
    cmd->add_option("--epsilon", config.epsilon, "Sinkhorn regularization");
    cmd->add_option("--seed", config.seed, "RNG seed (omitted: drawn and printed)");
    cmd->add_option("--format", config.output_format, "json | csv");
}

std::uint64_t resolve_seed(const RunConfig& config) {
    if (config.seed) return *config.seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

dfe::DivergenceGenerator make_gen(const RunConfig& config) {
    try {
        return dfe::make_generator(config.divergence, config.lambda);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

struct RunResult {
    dfe::ScoreReport report;
    dfe::FrontierCurve curve;
};

RunResult run_estimator(const RunConfig& config, const dfe::EmbeddingSet& X,
                        const dfe::EmbeddingSet& Y, std::uint64_t seed) {
    const dfe::DivergenceGenerator f = make_gen(config);
    RunResult out;
    if (config.estimator == "quantize") {
        out.report = dfe::quantized_scores(X, Y, f, config.k,
                                           dfe::smoothing_from_string(config.smoothing),
                                           config.c, config.grid_size, seed, 100, &out.curve);
    } else if (config.estimator == "knn") {
        dfe::KnnConfig kc;
        kc.k_neighbors = config.knn_k;
        kc.pca_dims = config.pca_dims;
        kc.seed = seed;
        out.report = dfe::knn_scores(X, Y, f, kc, config.c, config.grid_size, &out.curve);
    } else if (config.estimator == "kde") {
        out.report = dfe::kde_scores(X, Y, f, config.bandwidth, config.pca_dims, config.c,
                                     config.grid_size, &out.curve);
    } else if (config.estimator == "classifier") {
        dfe::ClassifierConfig cc;
        cc.seed = seed;
        cc.pca_dims = config.pca_dims;
        out.report = dfe::classifier_scores(X, Y, f, cc, config.c, config.grid_size, &out.curve);
    } else if (config.estimator == "gaussian") {
        out.report = dfe::gaussian_scores(X, Y, f, config.gaussian_pca_dims, config.mc_samples,
                                          config.c, config.grid_size, seed, &out.curve);
    } else if (config.estimator == "ot") {
        const dfe::EmbeddingSet joint = dfe::vconcat(X, Y);
        const dfe::QuantizationModel model = dfe::kmeans_fit(joint, config.k, seed, 100);
        const auto [P, Q] = dfe::assign_and_count(
            model, X, Y, dfe::smoothing_from_string(config.smoothing));
        const dfe::CostMatrix C = dfe::cost_from_centers(model);
        const double eps = config.epsilon ? *config.epsilon : dfe::default_epsilon(C);
        out.curve.grid_size = config.grid_size;
        for (int i = 1; i < config.grid_size; ++i) {
            const double lam = static_cast<double>(i) / config.grid_size;
            const dfe::Histogram R = dfe::mix(lam, P, Q);
            const dfe::SinkhornResult rx = dfe::sinkhorn_ot(P, R, C, eps);
            const dfe::SinkhornResult ry = dfe::sinkhorn_ot(Q, R, C, eps);
            if (!rx.converged || !ry.converged)
                throw NumericalError("sinkhorn did not converge, marginal violation " +
                                     std::to_string(std::max(rx.marginal_violation,
                                                             ry.marginal_violation)));
            out.curve.points.push_back({lam, rx.cost, ry.cost});
        }
        out.report.mauve = dfe::mauve_score(out.curve, config.c);
        out.report.fi = dfe::frontier_integral(out.curve);
        const auto& midpt = out.curve.points[(out.curve.points.size() - 1) / 2];
        out.report.mid = 0.5 * midpt.x + 0.5 * midpt.y;
        out.report.scale_c = config.c;
        out.report.generator = "ot_cost";
        out.report.estimator = "ot(k=" + std::to_string(config.k) +
                               ",epsilon=" + std::to_string(eps) + ")";
        out.report.seed = seed;
    } else {
        throw ConfigError("unknown estimator '" + config.estimator + "'");
    }
    return out;
}

json report_to_json(const RunConfig& config, const dfe::ScoreReport& report) {
    json j;
    j["schema"] = 1;
    if (config.summary == "all" || config.summary == "mauve") j["mauve"] = report.mauve;
    if (config.summary == "all" || config.summary == "fi") j["fi"] = report.fi;
    if (config.summary == "all" || config.summary == "mid") j["mid"] = report.mid;
    j["estimator"] = report.estimator;
    j["divergence"] = report.generator;
    j["c"] = report.scale_c;
    j["k"] = config.k;
    j["seed"] = report.seed;
    j["warnings"] = report.warnings;
    return j;
}

void validate_common(const RunConfig& config) {
    if (config.summary != "all" && config.summary != "mauve" && config.summary != "fi" &&
        config.summary != "mid")
        throw ConfigError("unknown summary '" + config.summary + "'");
    if (config.output_format != "json" && config.output_format != "csv")
        throw ConfigError("unknown output format '" + config.output_format + "'");
    if (config.grid_size < 2) throw ConfigError("grid size must be >= 2");
    if (config.c <= 0.0) throw ConfigError("c must be positive");
    try {
        dfe::smoothing_from_string(config.smoothing);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

int cmd_compare(const std::string& p_file, const std::string& q_file, const RunConfig& config) {
    validate_common(config);
    const dfe::EmbeddingSet X = dfe::read_embeddings(p_file);
    const dfe::EmbeddingSet Y = dfe::read_embeddings(q_file);
    if (X.dim != Y.dim) throw ConfigError("embedding dimensions differ");
    const std::uint64_t seed = resolve_seed(config);
    const RunResult result = run_estimator(config, X, Y, seed);
    if (config.output_format == "csv") {
        std::cout.precision(17);
        std::cout << "mauve,fi,mid,estimator,divergence,c,k,seed\n"
                  << result.report.mauve << ',' << result.report.fi << ','
                  << result.report.mid << ',' << result.report.estimator << ','
                  << result.report.generator << ',' << result.report.scale_c << ','
                  << config.k << ',' << seed << '\n';
    } else {
        std::cout << report_to_json(config, result.report).dump(2) << '\n';
    }
    return 0;
}

int cmd_frontier(const std::string& p_file, const std::string& q_file,
                 const RunConfig& config) {
    validate_common(config);
    const dfe::EmbeddingSet X = dfe::read_embeddings(p_file);
    const dfe::EmbeddingSet Y = dfe::read_embeddings(q_file);
    if (X.dim != Y.dim) throw ConfigError("embedding dimensions differ");
    const std::uint64_t seed = resolve_seed(config);
    const RunResult result = run_estimator(config, X, Y, seed);
    std::cout.precision(17);
    std::cout << "lambda,x,y,exp_neg_cx,exp_neg_cy\n";
    for (const auto& p : result.curve.points)
        std::cout << p.lambda << ',' << p.x << ',' << p.y << ','
                  << std::exp(-config.c * p.x) << ',' << std::exp(-config.c * p.y) << '\n';
    std::cerr << "seed=" << seed << '\n';
    return 0;
}

int cmd_simulate(const std::string& p_spec, const std::string& q_spec, std::size_t k,
                 const std::vector<std::uint64_t>& n_grid,
                 const std::vector<std::string>& smoothing_names, int reps,
                 const RunConfig& config) {
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (n_grid.empty()) throw ConfigError("at least one --n is required");
    const std::uint64_t seed = resolve_seed(config);
    dfe::SyntheticSpec sp, sq;
    try {
        sp = dfe::parse_synthetic_spec(p_spec, k, seed ^ 0x9e3779b97f4a7c15ULL);
        sq = dfe::parse_synthetic_spec(q_spec, k, seed ^ 0xbf58476d1ce4e5b9ULL);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    dfe::Histogram P = dfe::make_distribution(sp);
    dfe::Histogram Q = dfe::make_distribution(sq);
    std::vector<dfe::Smoothing> estimators;
    for (const auto& name : smoothing_names) {
        try {
            estimators.push_back(dfe::smoothing_from_string(name));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (estimators.empty()) estimators = {dfe::Smoothing::none, dfe::Smoothing::krichevsky_trofimov};
    const auto rows = dfe::error_study(P, Q, estimators, n_grid, reps, seed);
    std::cout.precision(17);
    std::cout << "family_p,family_q,k,n,estimator,reps,mean_abs_err,std_err\n";
    for (const auto& row : rows)
        std::cout << p_spec << ',' << q_spec << ',' << k << ',' << row.n << ','
                  << dfe::to_string(row.smoothing) << ',' << reps << ',' << row.mean_abs_err
                  << ',' << row.std_err << '\n';
    return 0;
}

int cmd_quantize(const std::string& p_file, const std::string& q_file, const RunConfig& config,
                 const std::string& out_path) {
    validate_common(config);
    const dfe::EmbeddingSet X = dfe::read_embeddings(p_file);
    const dfe::EmbeddingSet Y = dfe::read_embeddings(q_file);
    if (X.dim != Y.dim) throw ConfigError("embedding dimensions differ");
    const std::uint64_t seed = resolve_seed(config);
    const dfe::QuantizationModel model =
        dfe::kmeans_fit(dfe::vconcat(X, Y), config.k, seed, 100);
    const auto [P, Q] =
        dfe::assign_and_count(model, X, Y, dfe::smoothing_from_string(config.smoothing));
    json j;
    j["schema"] = 1;
    j["k"] = config.k;
    j["smoothing"] = config.smoothing;
    j["seed"] = seed;
    j["p"] = P.probs();
    j["q"] = Q.probs();
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
        out << j.dump(2) << '\n';
    }
    return 0;
}

int emit_error(int code, const std::string& kind, const std::string& message) {
    json j;
    j["error"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"f-divergence frontiers and scalar summaries for embedding sets"};
    app.require_subcommand(1);

    if (const char* threads = std::getenv("DFE_THREADS")) {
        // accepted as a cap on worker count; all current code paths are
        // single-threaded, so this only validates the value
        char* end = nullptr;
        const long v = std::strtol(threads, &end, 10);
        if (end == threads || v < 1)
            return emit_error(3, "config", "DFE_THREADS must be a positive integer");
    }

    RunConfig config;
    std::string p_file, q_file, out_path;
    std::string p_spec = "zipf:1", q_spec = "zipf:1";
    std::size_t sim_k = 100;
    std::vector<std::uint64_t> n_grid;
    std::vector<std::string> smoothing_names;
    int reps = 10;

    CLI::App* compare = app.add_subcommand("compare", "score two embedding files");
    compare->add_option("p_file", p_file)->required();
    compare->add_option("q_file", q_file)->required();
    add_common_flags(compare, config);

    CLI::App* frontier = app.add_subcommand("frontier", "export the frontier curve as CSV");
    frontier->add_option("p_file", p_file)->required();
    frontier->add_option("q_file", q_file)->required();
    add_common_flags(frontier, config);

    CLI::App* simulate = app.add_subcommand("simulate", "synthetic error study");
    simulate->add_option("--p", p_spec, "P family, e.g. zipf:1 or dirichlet:0.5");
    simulate->add_option("--q", q_spec, "Q family");
    simulate->add_option("--k", sim_k, "bins");
    simulate->add_option("--n", n_grid, "sample sizes (repeatable)");
    simulate->add_option("--estimators", smoothing_names, "smoothing schemes (repeatable)");
    simulate->add_option("--reps", reps, "replications");
    simulate->add_option("--seed", config.seed, "RNG seed");

    CLI::App* quantize = app.add_subcommand("quantize", "emit smoothed quantized histograms");
    quantize->add_option("p_file", p_file)->required();
    quantize->add_option("q_file", q_file)->required();
    quantize->add_option("--out", out_path, "output path (default stdout)");
    add_common_flags(quantize, config);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::stringstream ss;
        ss << e.what();
        return emit_error(3, "config", ss.str());
    }

    try {
        if (compare->parsed()) return cmd_compare(p_file, q_file, config);
        if (frontier->parsed()) return cmd_frontier(p_file, q_file, config);
        if (simulate->parsed())
            return cmd_simulate(p_spec, q_spec, sim_k, n_grid, smoothing_names, reps, config);
        if (quantize->parsed()) return cmd_quantize(p_file, q_file, config, out_path);
    } catch (const ConfigError& e) {
        return emit_error(3, "config", e.what());
    } catch (const NumericalError& e) {
        return emit_error(4, "numerical", e.what());
    } catch (const std::invalid_argument& e) {
        return emit_error(3, "config", e.what());
    } catch (const std::runtime_error& e) {
        return emit_error(2, "io", e.what());
    }
    return emit_error(3, "config", "no subcommand given");
}
