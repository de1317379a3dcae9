#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "learnrk/butcher.hpp"
#include "learnrk/design.hpp"
#include "learnrk/grid.hpp"
#include "learnrk/learnability.hpp"
#include "learnrk/serialize.hpp"
#include "learnrk/stability.hpp"
#include "learnrk/trainer.hpp"
#include "learnrk/util.hpp"
#include "learnrk/version.hpp"

namespace {

using namespace learnrk;

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

bool is_usage_code(const std::string& code) {
    return code == "parse_error" || code == "unknown_method" || code == "dimension_mismatch" ||
           code == "invalid_argument" || code == "nonfinite_entry";
}

void print_error(const std::string& code, const std::string& message) {
    Json j;
    j["code"] = code;
    j["message"] = message;
    std::cerr << j.dump() << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("short write to " + path);
}

ButcherTableau load_method(const std::string& method, const std::string& tableau_file) {
    if (method.empty() == tableau_file.empty()) {
        throw InvalidArgumentError("exactly one of --method or --tableau is required");
    }
    if (!method.empty()) return builtin(method);
    return parse_tableau(read_file(tableau_file));
}

RootPolicy parse_policy(const std::string& text) {
    if (text == "closest") return RootPolicy::closest();
    if (text == "all") return RootPolicy::all();
    int index = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), index);
    if (ec != std::errc() || ptr != text.data() + text.size() || index < 0) {
        throw InvalidArgumentError("policy must be closest, all, or a root index >= 0");
    }
    return RootPolicy::at(index);
}

std::vector<double> parse_levels(const std::string& text) {
    std::vector<double> levels;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::size_t end = comma == std::string::npos ? text.size() : comma;
        levels.push_back(parse_double_strict(text.substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return levels;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct SolveArgs {
    std::string method;
    std::string tableau_file;
    std::string lambda_text;
    double h = 1.0;
    std::string policy_text = "closest";
};

int run_solve(const SolveArgs& a) {
    ButcherTableau t = load_method(a.method, a.tableau_file);
    ProblemSpec spec{parse_complex(a.lambda_text), a.h};
    LearnabilityResult result = solve(t, spec, parse_policy(a.policy_text));
    std::cout << result_to_json(result).dump(2) << "\n";
    return 0;
}

struct AnalyzeArgs {
    std::string method;
    std::string tableau_file;
    std::string metric_text = "l_alpha";
    std::string policy_text = "closest";
    Region region;
    std::string levels_text = "1e-3,1e-2,1e-1,1";
    std::string out_prefix;
};

int run_analyze(const AnalyzeArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    ButcherTableau t = load_method(a.method, a.tableau_file);
    Metric metric = metric_from_name(a.metric_text);
    RootPolicy policy = parse_policy(a.policy_text);
    std::vector<double> levels = parse_levels(a.levels_text);

    CoefficientField field = evaluate_field(t, a.region, metric, policy);
    const std::string csv_path = a.out_prefix + ".csv";
    const std::string svg_path = a.out_prefix + ".svg";
    const std::string manifest_path = a.out_prefix + ".manifest.json";
    write_file(csv_path, export_csv(field));
    write_file(svg_path, render_contours(field, levels));

    RunManifest m;
    m.command = "analyze";
    m.config = Json{{"method", t.name},
                    {"metric", a.metric_text},
                    {"policy", a.policy_text},
                    {"region", Json{{"re_min", a.region.re_min},
                                    {"re_max", a.region.re_max},
                                    {"im_min", a.region.im_min},
                                    {"im_max", a.region.im_max},
                                    {"nx", a.region.nx},
                                    {"ny", a.region.ny}}},
                    {"levels", levels},
                    {"threads", thread_count_from_env()}};
    m.outputs = {csv_path, svg_path, manifest_path};
    m.wall_time_seconds = elapsed_seconds(start);
    write_file(manifest_path, manifest_to_json(m).dump(2) + "\n");

    Json done;
    done["outputs"] = m.outputs;
    std::cout << done.dump(2) << "\n";
    return 0;
}

struct DesignArgs {
    int stages = 0;
    double tol = 0.2;
};

int run_design(const DesignArgs& a) {
    DesignedScheme scheme = design_scheme(a.stages, a.tol);
    Json j = scheme_to_json(scheme);
    j["comparison"] = Json{{"method", "explicit_midpoint"},
                           {"reach", damping_reach(builtin("explicit_midpoint"), a.tol)}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct TrainArgs {
    std::string method;
    std::string lambda_text;
    double h = 1.0;
    std::string model = "mlp";
    std::uint64_t seed = 0;
    int n = 10000;
    double box = 10.0;
    int hidden = 200;
    double lr = 0.001;
    int epochs = 3000;
    int batch = 0;
    std::string init_text;
    double t_max = 10.0;
    int samples = 200;
    std::string out_prefix;
};

int run_train(const TrainArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    ButcherTableau t = builtin(a.method);
    const Complex lambda = parse_complex(a.lambda_text);
    ProblemSpec spec{lambda, a.h};
    Dataset data = generate_dataset(lambda, a.h, a.n, a.box, a.seed);

    OptimizerConfig cfg;
    cfg.lr = a.lr;
    cfg.epochs = a.epochs;
    cfg.batch = a.batch;

    TrainingReport report;
    if (a.model == "linear") {
        const Complex init = a.init_text.empty() ? lambda : parse_complex(a.init_text);
        report = fit_linear(t, data, init, cfg);
    } else if (a.model == "mlp") {
        report = fit_mlp(t, data, MlpConfig{a.hidden, a.seed}, cfg);
    } else {
        throw InvalidArgumentError("model must be linear or mlp");
    }

    LearnabilityResult result = solve(t, spec, RootPolicy::closest());
    TrajectoryConfig traj;
    traj.t_max = a.t_max;
    traj.samples = a.samples;
    ComparisonReport cmp = compare_with_theory(report, result, spec, traj);

    Json report_doc;
    report_doc["problem"] = Json{{"lambda", complex_to_json(lambda)}, {"h", a.h}};
    report_doc["report"] = report_to_json(report);
    const std::string report_json = report_doc.dump(2) + "\n";

    const std::string report_path = a.out_prefix + ".report.json";
    const std::string traj_path = a.out_prefix + ".trajectory.csv";
    const std::string cmp_path = a.out_prefix + ".comparison.json";
    const std::string manifest_path = a.out_prefix + ".manifest.json";
    write_file(report_path, report_json);
    write_file(traj_path, trajectory_csv(cmp));
    write_file(cmp_path, comparison_to_json(cmp).dump(2) + "\n");

    RunManifest m;
    m.command = "train";
    m.config = Json{{"method", a.method},
                    {"lambda", complex_to_json(lambda)},
                    {"h", a.h},
                    {"model", a.model},
                    {"n", a.n},
                    {"box", a.box},
                    {"hidden", a.hidden},
                    {"init", a.init_text},
                    {"optimizer", optimizer_to_json(cfg)},
                    {"t_max", a.t_max},
                    {"samples", a.samples}};
    m.seed = a.seed;
    m.outputs = {report_path, traj_path, cmp_path, manifest_path};
    m.wall_time_seconds = elapsed_seconds(start);
    write_file(manifest_path, manifest_to_json(m).dump(2) + "\n");

    std::cout << report_json;
    return 0;
}

struct CompareArgs {
    std::string report_file;
    double t_max = 10.0;
    int samples = 200;
    std::string out_prefix;
};

int run_compare(const CompareArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    nlohmann::json doc = nlohmann::json::parse(read_file(a.report_file), nullptr, false);
    if (doc.is_discarded() || !doc.contains("problem") || !doc.contains("report")) {
        throw ParseError("report file is not a training report document");
    }
    const Complex lambda = complex_from_json(doc["problem"].at("lambda"));
    const double h = doc["problem"].at("h").get<double>();
    ProblemSpec spec{lambda, h};
    ButcherTableau t = builtin(doc["report"].at("method").get<std::string>());

    TrainingReport report;
    report.estimated_alpha = complex_from_json(doc["report"].at("estimated_alpha"));

    LearnabilityResult result = solve(t, spec, RootPolicy::closest());
    TrajectoryConfig traj;
    traj.t_max = a.t_max;
    traj.samples = a.samples;
    ComparisonReport cmp = compare_with_theory(report, result, spec, traj);

    Json out = comparison_to_json(cmp);
    Json roots = Json::array();
    for (const LearnabilityRoot& root : result.roots) roots.push_back(complex_to_json(root.alpha));
    out["roots"] = roots;

    if (!a.out_prefix.empty()) {
        const std::string cmp_path = a.out_prefix + ".comparison.json";
        const std::string traj_path = a.out_prefix + ".trajectory.csv";
        const std::string manifest_path = a.out_prefix + ".manifest.json";
        write_file(cmp_path, out.dump(2) + "\n");
        write_file(traj_path, trajectory_csv(cmp));
        RunManifest m;
        m.command = "compare";
        m.config = Json{{"report", a.report_file}, {"t_max", a.t_max}, {"samples", a.samples}};
        m.outputs = {cmp_path, traj_path, manifest_path};
        m.wall_time_seconds = elapsed_seconds(start);
        write_file(manifest_path, manifest_to_json(m).dump(2) + "\n");
    }

    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_list() {
    for (const std::string& name : builtin_names()) {
        ButcherTableau t = builtin(name);
        ValidationReport v = validate(t);
        std::printf("%-17s stages=%d  %-8s  order %d\n", name.c_str(), t.p,
                    t.is_explicit ? "explicit" : "implicit", v.detected_order);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learnability analysis of Runge-Kutta training dynamics"};
    // --h is a real option on solve/train, so help must not claim -h.
    app.set_help_flag("--help", "Print help and exit");
    app.set_version_flag("--version", LEARNRK_VERSION);
    app.require_subcommand(1);
    auto add_subcommand = [&](const std::string& name, const std::string& desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->set_help_flag("--help", "Print help and exit");
        return cmd;
    };

    CLI::App* list_cmd = add_subcommand("list", "List built-in methods");

    SolveArgs solve_args;
    CLI::App* solve_cmd = add_subcommand("solve", "Solve the learnability equation");
    solve_cmd->add_option("--method", solve_args.method, "Built-in method name");
    solve_cmd->add_option("--tableau", solve_args.tableau_file, "Tableau JSON file");
    solve_cmd->add_option("--lambda", solve_args.lambda_text, "Complex lambda, e.g. 1.5i or 1+2i")
        ->required();
    solve_cmd->add_option("--h", solve_args.h, "Step size");
    solve_cmd->add_option("--policy", solve_args.policy_text, "closest, all, or root index");

    AnalyzeArgs analyze_args;
    CLI::App* analyze_cmd = add_subcommand("analyze", "Sweep a region and write CSV + SVG");
    analyze_cmd->add_option("--method", analyze_args.method, "Built-in method name");
    analyze_cmd->add_option("--tableau", analyze_args.tableau_file, "Tableau JSON file");
    analyze_cmd->add_option("--metric", analyze_args.metric_text, "l_alpha, l_real, or l_imag");
    analyze_cmd->add_option("--policy", analyze_args.policy_text, "closest or root index");
    analyze_cmd->add_option("--re-min", analyze_args.region.re_min, "Region lower real bound");
    analyze_cmd->add_option("--re-max", analyze_args.region.re_max, "Region upper real bound");
    analyze_cmd->add_option("--im-min", analyze_args.region.im_min, "Region lower imag bound");
    analyze_cmd->add_option("--im-max", analyze_args.region.im_max, "Region upper imag bound");
    analyze_cmd->add_option("--nx", analyze_args.region.nx, "Nodes along the real axis");
    analyze_cmd->add_option("--ny", analyze_args.region.ny, "Nodes along the imag axis");
    analyze_cmd->add_option("--levels", analyze_args.levels_text, "Comma-separated contour levels");
    analyze_cmd->add_option("--out", analyze_args.out_prefix, "Output path prefix")->required();

    DesignArgs design_args;
    CLI::App* design_cmd = add_subcommand("design", "Chebyshev-stabilized scheme design");
    design_cmd->add_option("--stages", design_args.stages, "Stage count")->required();
    design_cmd->add_option("--tol", design_args.tol, "Damping tolerance");

    TrainArgs train_args;
    CLI::App* train_cmd = add_subcommand("train", "Train a model through the one-step loss");
    train_cmd->add_option("--method", train_args.method, "Built-in explicit method")->required();
    train_cmd->add_option("--lambda", train_args.lambda_text, "Complex lambda")->required();
    train_cmd->add_option("--h", train_args.h, "Step size");
    train_cmd->add_option("--model", train_args.model, "linear or mlp");
    train_cmd->add_option("--seed", train_args.seed, "PRNG seed for data and weights");
    train_cmd->add_option("--n", train_args.n, "Dataset size");
    train_cmd->add_option("--box", train_args.box, "Sample box half-width");
    train_cmd->add_option("--hidden", train_args.hidden, "Hidden units (mlp)");
    train_cmd->add_option("--lr", train_args.lr, "Adam learning rate");
    train_cmd->add_option("--epochs", train_args.epochs, "Training epochs");
    train_cmd->add_option("--batch", train_args.batch, "Mini-batch size (0 = full batch)");
    train_cmd->add_option("--init", train_args.init_text, "Linear init alpha (default: lambda)");
    train_cmd->add_option("--t-max", train_args.t_max, "Trajectory horizon");
    train_cmd->add_option("--samples", train_args.samples, "Trajectory sample count");
    train_cmd->add_option("--out", train_args.out_prefix, "Output path prefix")->required();

    CompareArgs compare_args;
    CLI::App* compare_cmd = add_subcommand("compare", "Compare a report with the theory");
    compare_cmd->add_option("--report", compare_args.report_file, "Training report JSON file")
        ->required();
    compare_cmd->add_option("--t-max", compare_args.t_max, "Trajectory horizon");
    compare_cmd->add_option("--samples", compare_args.samples, "Trajectory sample count");
    compare_cmd->add_option("--out", compare_args.out_prefix, "Optional output path prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (list_cmd->parsed()) return run_list();
        if (solve_cmd->parsed()) return run_solve(solve_args);
        if (analyze_cmd->parsed()) return run_analyze(analyze_args);
        if (design_cmd->parsed()) return run_design(design_args);
        if (train_cmd->parsed()) return run_train(train_args);
        if (compare_cmd->parsed()) return run_compare(compare_args);
    } catch (const Error& e) {
        print_error(e.code(), e.what());
        return is_usage_code(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 2;
}
