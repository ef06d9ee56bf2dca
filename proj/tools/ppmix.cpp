// ppmix command line interface: fit, project, cluster, pipeline, simulate,
// evaluate. Every subcommand that writes artifacts also writes a
// run-manifest.json echoing the resolved configuration, and the pipeline
// subcommand is byte-identical to running fit, project, cluster and evaluate
// manually on the intermediate files.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppmix/dataset.hpp"
#include "ppmix/em.hpp"
#include "ppmix/errors.hpp"
#include "ppmix/ga.hpp"
#include "ppmix/metrics.hpp"
#include "ppmix/mixture.hpp"
#include "ppmix/modal_em.hpp"
#include "ppmix/pipeline.hpp"
#include "ppmix/serialize.hpp"

namespace {

using nlohmann::json;
using namespace ppmix;

// ---------------------------------------------------------------------------
// Option parsing helpers

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, sep)) parts.push_back(token);
    return parts;
}

int parse_positive_int(const std::string& token, const std::string& what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || value < 1) {
        throw ContractViolation(what + ": expected a positive integer, got '" + token + "'");
    }
    return value;
}

// Accepts "3", "1-9", or "1,2,5"; a range expands inclusively.
std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> values;
    for (const std::string& piece : split_on(text, ',')) {
        const std::size_t dash = piece.find('-');
        if (dash != std::string::npos && dash > 0) {
            const int lo = parse_positive_int(piece.substr(0, dash), what);
            const int hi = parse_positive_int(piece.substr(dash + 1), what);
            if (hi < lo) throw ContractViolation(what + ": empty range '" + piece + "'");
            for (int v = lo; v <= hi; ++v) values.push_back(v);
        } else {
            values.push_back(parse_positive_int(piece, what));
        }
    }
    if (values.empty()) throw ContractViolation(what + ": no values given");
    return values;
}

std::vector<CovarianceFamily> parse_families(const std::string& text) {
    std::vector<CovarianceFamily> families;
    for (const std::string& name : split_on(text, ',')) {
        families.push_back(family_from_name(name));
    }
    if (families.empty()) throw ContractViolation("--families: no values given");
    return families;
}

std::string format_fixed4(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", value);
    return buf;
}

// ---------------------------------------------------------------------------
// Shared artifact writers. The pipeline subcommand reuses these so its output
// files match the standalone subcommands byte for byte.

std::filesystem::path prepare_output_dir(const std::string& dir) {
    std::filesystem::path path(dir);
    std::filesystem::create_directories(path);
    return path;
}

void write_manifest(const std::filesystem::path& dir, const json& manifest) {
    write_text_file((dir / "run-manifest.json").string(), manifest.dump(2) + "\n");
}

json em_config_json(const EmConfig& em) {
    return json{{"tol", em.tol},
                {"max_iter", em.max_iter},
                {"n_starts", em.n_starts},
                {"reg_scale", em.reg_scale},
                {"collapse_eps", em.collapse_eps}};
}

json ga_config_json(const GaConfig& ga) {
    return json{{"population_size", ga.population_size},
                {"max_generations", ga.max_generations},
                {"stagnation_generations", ga.stagnation_generations},
                {"stagnation_tol", ga.stagnation_tol},
                {"crossover_rate", ga.crossover_rate},
                {"mutation_rate", ga.mutation_rate},
                {"elitism_count", ga.elitism_count}};
}

json mem_config_json(const MemConfig& mem) {
    return json{{"step_rate", mem.step_rate},
                {"tol", mem.tol},
                {"max_iter", mem.max_iter},
                {"merge_eps", mem.merge_eps},
                {"record_paths", mem.record_paths}};
}

json components_json(const std::vector<int>& grid) { return json(grid); }

json families_json(const std::vector<CovarianceFamily>& families) {
    json out = json::array();
    for (CovarianceFamily family : families) out.push_back(family_name(family));
    return out;
}

void write_single_column(const std::filesystem::path& path, const std::string& header,
                         const VectorXi& values) {
    std::string out = header + "\n";
    for (int i = 0; i < values.size(); ++i) {
        out += std::to_string(values[i]);
        out += '\n';
    }
    write_text_file(path.string(), out);
}

std::vector<std::string> pp_names(int d) {
    std::vector<std::string> names;
    names.reserve(d);
    for (int k = 1; k <= d; ++k) names.push_back("PP" + std::to_string(k));
    return names;
}

void write_fit_artifacts(const std::filesystem::path& dir, const SelectionReport& selection,
                         const MatrixXd& standardized,
                         const std::vector<std::string>& column_names,
                         const VectorXi* labels) {
    write_text_file((dir / "bic_grid.csv").string(), grid_to_csv(selection));
    save_fit((dir / "model.json").string(), selection.best);
    write_csv((dir / "standardized.csv").string(), standardized, column_names);
    if (labels != nullptr) write_single_column(dir / "truth.csv", "class", *labels);
}

void write_projection_artifacts(const std::filesystem::path& dir, const PpResult& pp,
                                const MatrixXd& projected, const std::string& suffix) {
    save_projection((dir / ("projection" + suffix + ".json")).string(), pp);
    write_csv((dir / ("projected" + suffix + ".csv")).string(), projected,
              pp_names(static_cast<int>(projected.cols())));
}

void write_cluster_artifacts(const std::filesystem::path& dir,
                             const SelectionReport& selection, const ModalResult& modal) {
    write_text_file((dir / "cluster_bic_grid.csv").string(), grid_to_csv(selection));
    save_fit((dir / "cluster_model.json").string(), selection.best);
    write_text_file((dir / "modes.json").string(), modal_to_json(modal));
    write_single_column(dir / "labels.csv", "label", modal.assignments);
}

void write_ari(const std::filesystem::path& dir, double ari) {
    write_text_file((dir / "ari.txt").string(), format_fixed4(ari) + "\n");
}

// Single-column integer CSV; one optional non-numeric header line.
VectorXi read_label_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::vector<int> values;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string token = line;
        token.erase(0, token.find_first_not_of(" \t"));
        token.erase(token.find_last_not_of(" \t") + 1);
        if (token.empty()) continue;
        int value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size()) {
            if (number == 1) continue;  // header
            throw ParseError(path + ": line " + std::to_string(number) +
                             ": expected an integer label, got '" + token + "'");
        }
        values.push_back(value);
    }
    VectorXi out(static_cast<int>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) out[static_cast<int>(i)] = values[i];
    return out;
}

// ---------------------------------------------------------------------------
// Resolved options per subcommand

struct CommonOptions {
    std::string input;
    std::string output_dir = ".";
    std::uint64_t seed = 0;
    std::string components = "1-9";
    std::string families = "EII,VII,EEI,VVI,EEE,VVV";
    std::string dim = "2";
    std::string label_column;  // empty: auto-detect "class"
    bool no_standardize = false;
    bool record_paths = false;
};

std::optional<std::string> label_option(const CommonOptions& opt) {
    if (opt.label_column.empty()) return std::nullopt;
    return opt.label_column;
}

int run_fit(const CommonOptions& opt) {
    const LabeledDataset data = load_csv(opt.input, label_option(opt));
    const std::vector<int> components = parse_int_list(opt.components, "--components");
    const std::vector<CovarianceFamily> families = parse_families(opt.families);

    Standardization standardization;
    if (opt.no_standardize) {
        standardization.mean = VectorXd::Zero(data.points.cols());
        standardization.scale = VectorXd::Ones(data.points.cols());
    } else {
        standardization = fit_standardization(data.points);
    }
    const MatrixXd x = standardization.transform(data.points);

    PipelineConfig config;
    config.component_grid = components;
    config.families = families;
    config.seed = opt.seed;
    const SelectionReport selection = stage_fit(x, config);

    const std::filesystem::path dir = prepare_output_dir(opt.output_dir);
    write_fit_artifacts(dir, selection, x, data.column_names,
                        data.has_labels() ? &data.labels : nullptr);
    write_manifest(dir, json{{"command", "fit"},
                             {"input", opt.input},
                             {"output_dir", opt.output_dir},
                             {"seed", opt.seed},
                             {"standardize", !opt.no_standardize},
                             {"components", components_json(components)},
                             {"families", families_json(families)},
                             {"em", em_config_json(config.em)}});

    const FitReport& best = selection.best;
    std::cout << "selected G=" << best.model.n_components << " "
              << family_name(best.model.family) << ", BIC " << best.bic << "\n";
    return 0;
}

int run_project(const CommonOptions& opt, const std::string& model_path) {
    const LabeledDataset data = load_csv(opt.input);
    const std::string resolved_model =
        model_path.empty() ? (std::filesystem::path(opt.output_dir) / "model.json").string()
                           : model_path;
    const FitReport fit = load_fit(resolved_model);
    if (fit.model.dim != static_cast<int>(data.points.cols())) {
        throw ContractViolation("model dimension " + std::to_string(fit.model.dim) +
                                " does not match data columns " +
                                std::to_string(data.points.cols()));
    }
    const std::vector<int> dims = parse_int_list(opt.dim, "--dim");
    for (int d : dims) {
        if (d >= fit.model.dim) {
            throw ContractViolation("--dim " + std::to_string(d) +
                                    " must be below the input dimension " +
                                    std::to_string(fit.model.dim));
        }
    }

    PipelineConfig config;
    config.seed = opt.seed;
    const std::filesystem::path dir = prepare_output_dir(opt.output_dir);
    const bool sweep = dims.size() > 1;
    std::string summary = "d,negentropy,entropy,gaussian_entropy,generations_run\n";
    for (int d : dims) {
        config.dim_out = d;
        const PpResult pp = stage_project(fit.model, config);
        const MatrixXd projected = data.points * pp.basis.matrix;
        write_projection_artifacts(dir, pp, projected,
                                   sweep ? "_d" + std::to_string(d) : "");
        summary += std::to_string(d) + "," + format_fixed4(pp.negentropy) + "," +
                   format_fixed4(pp.entropy) + "," + format_fixed4(pp.gaussian_entropy) +
                   "," + std::to_string(pp.generations_run) + "\n";
        std::cout << "d=" << d << " negentropy " << pp.negentropy << "\n";
    }
    if (sweep) write_text_file((dir / "negentropy_by_dim.csv").string(), summary);

    write_manifest(dir, json{{"command", "project"},
                             {"input", opt.input},
                             {"model", resolved_model},
                             {"output_dir", opt.output_dir},
                             {"seed", opt.seed},
                             {"dim", json(dims)},
                             {"ga", ga_config_json(config.ga)}});
    return 0;
}

int run_cluster(const CommonOptions& opt) {
    const LabeledDataset data = load_csv(opt.input);
    const std::vector<int> components = parse_int_list(opt.components, "--components");
    const std::vector<CovarianceFamily> families = parse_families(opt.families);

    PipelineConfig config;
    config.component_grid = components;
    config.families = families;
    config.seed = opt.seed;
    config.mem.record_paths = opt.record_paths;
    const ClusterStageResult result = stage_cluster(data.points, config);

    const std::filesystem::path dir = prepare_output_dir(opt.output_dir);
    write_cluster_artifacts(dir, result.selection, result.modal);
    write_manifest(dir, json{{"command", "cluster"},
                             {"input", opt.input},
                             {"output_dir", opt.output_dir},
                             {"seed", opt.seed},
                             {"components", components_json(components)},
                             {"families", families_json(families)},
                             {"em", em_config_json(config.em)},
                             {"mem", mem_config_json(config.mem)}});

    std::cout << result.modal.n_modes() << " modes\n";
    return 0;
}

int run_pipeline_cmd(const CommonOptions& opt) {
    const LabeledDataset data = load_csv(opt.input, label_option(opt));
    const std::vector<int> dims = parse_int_list(opt.dim, "--dim");
    if (dims.size() != 1) throw ContractViolation("pipeline takes a single --dim");

    PipelineConfig config;
    config.component_grid = parse_int_list(opt.components, "--components");
    config.families = parse_families(opt.families);
    config.dim_out = dims.front();
    config.standardize = !opt.no_standardize;
    config.seed = opt.seed;
    config.mem.record_paths = opt.record_paths;

    const PipelineResult result = run_pipeline(data, config);
    const MatrixXd x = result.standardization.transform(data.points);

    const std::filesystem::path dir = prepare_output_dir(opt.output_dir);
    write_fit_artifacts(dir, result.selection, x, data.column_names,
                        data.has_labels() ? &data.labels : nullptr);
    write_projection_artifacts(dir, result.projection, result.projected_points, "");
    write_cluster_artifacts(dir, result.cluster_selection, result.modal);
    if (result.ari.has_value()) write_ari(dir, *result.ari);
    write_manifest(dir, json{{"command", "pipeline"},
                             {"input", opt.input},
                             {"output_dir", opt.output_dir},
                             {"seed", opt.seed},
                             {"dim", config.dim_out},
                             {"standardize", config.standardize},
                             {"components", components_json(config.component_grid)},
                             {"families", families_json(config.families)},
                             {"em", em_config_json(config.em)},
                             {"ga", ga_config_json(config.ga)},
                             {"mem", mem_config_json(config.mem)}});

    std::cout << "fit: G=" << result.selection.best.model.n_components << " "
              << family_name(result.selection.best.model.family)
              << "; projection negentropy " << result.projection.negentropy
              << "; modes " << result.modal.n_modes() << "\n";
    if (result.ari.has_value()) std::cout << format_fixed4(*result.ari) << "\n";
    return 0;
}

int run_simulate(const std::string& generator, const CommonOptions& opt) {
    LabeledDataset data;
    if (generator == "two-group") {
        data = gen_two_group(opt.seed);
    } else if (generator == "block8") {
        data = gen_block_clusters(opt.seed);
    } else {
        throw ContractViolation("unknown generator '" + generator +
                                "' (expected two-group or block8)");
    }
    const std::filesystem::path dir = prepare_output_dir(opt.output_dir);
    write_csv((dir / "dataset.csv").string(), data.points, data.column_names,
              &data.labels);
    write_manifest(dir, json{{"command", "simulate"},
                             {"generator", generator},
                             {"output_dir", opt.output_dir},
                             {"seed", opt.seed}});
    std::cout << (dir / "dataset.csv").string() << "\n";
    return 0;
}

int run_evaluate(const std::string& path_a, const std::string& path_b,
                 const std::string& output_dir) {
    const VectorXi a = read_label_csv(path_a);
    const VectorXi b = read_label_csv(path_b);
    const double ari = adjusted_rand_index(a, b);
    if (!output_dir.empty()) {
        const std::filesystem::path dir = prepare_output_dir(output_dir);
        write_ari(dir, ari);
        write_manifest(dir, json{{"command", "evaluate"},
                                 {"labels_a", path_a},
                                 {"labels_b", path_b},
                                 {"output_dir", output_dir}});
    }
    std::cout << format_fixed4(ari) << "\n";
    return 0;
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_input = true) {
    if (with_input) {
        cmd->add_option("--input", opt.input, "Input CSV file")->required();
    }
    cmd->add_option("--output-dir", opt.output_dir, "Directory for output artifacts");
    cmd->add_option("--seed", opt.seed, "Random seed");
    cmd->set_config("--config", "", "Flat key=value configuration file; flags win");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parsimonious mixtures, negentropy projection pursuit, modal clustering"};
    app.require_subcommand(1);

    CommonOptions fit_opt;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit mixtures over a BIC grid");
    add_common_flags(fit_cmd, fit_opt);
    fit_cmd->add_option("--components", fit_opt.components, "Component counts, e.g. 1-9 or 2,3");
    fit_cmd->add_option("--families", fit_opt.families, "Comma-separated family names");
    fit_cmd->add_option("--label", fit_opt.label_column, "Label column name (default: class)");
    fit_cmd->add_flag("--no-standardize", fit_opt.no_standardize, "Skip standardization");

    CommonOptions project_opt;
    std::string project_model;
    CLI::App* project_cmd = app.add_subcommand("project", "Negentropy projection pursuit");
    add_common_flags(project_cmd, project_opt);
    project_cmd->add_option("--model", project_model, "Fitted model JSON (default: <output-dir>/model.json)");
    project_cmd->add_option("--dim", project_opt.dim, "Projection dimension, or a range like 1-5");

    CommonOptions cluster_opt;
    CLI::App* cluster_cmd = app.add_subcommand("cluster", "Modal clustering of projected data");
    add_common_flags(cluster_cmd, cluster_opt);
    cluster_cmd->add_option("--components", cluster_opt.components, "Component counts for the projected fit");
    cluster_cmd->add_option("--families", cluster_opt.families, "Comma-separated family names");
    cluster_cmd->add_flag("--record-paths", cluster_opt.record_paths, "Record ascent paths in modes.json");

    CommonOptions pipeline_opt;
    CLI::App* pipeline_cmd = app.add_subcommand("pipeline", "fit, project, cluster, evaluate");
    add_common_flags(pipeline_cmd, pipeline_opt);
    pipeline_cmd->add_option("--dim", pipeline_opt.dim, "Projection dimension");
    pipeline_cmd->add_option("--components", pipeline_opt.components, "Component counts, e.g. 1-9");
    pipeline_cmd->add_option("--families", pipeline_opt.families, "Comma-separated family names");
    pipeline_cmd->add_option("--label", pipeline_opt.label_column, "Label column name (default: class)");
    pipeline_cmd->add_flag("--no-standardize", pipeline_opt.no_standardize, "Skip standardization");
    pipeline_cmd->add_flag("--record-paths", pipeline_opt.record_paths, "Record ascent paths in modes.json");

    CommonOptions simulate_opt;
    std::string generator;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset");
    simulate_cmd->add_option("generator", generator, "two-group or block8")->required();
    add_common_flags(simulate_cmd, simulate_opt, /*with_input=*/false);

    std::string eval_a;
    std::string eval_b;
    std::string eval_output_dir;
    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Adjusted Rand index of two labelings");
    evaluate_cmd->add_option("labels_a", eval_a, "First single-column label CSV")->required();
    evaluate_cmd->add_option("labels_b", eval_b, "Second single-column label CSV")->required();
    evaluate_cmd->add_option("--output-dir", eval_output_dir, "Also write ari.txt here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    }

    try {
        if (fit_cmd->parsed()) return run_fit(fit_opt);
        if (project_cmd->parsed()) return run_project(project_opt, project_model);
        if (cluster_cmd->parsed()) return run_cluster(cluster_opt);
        if (pipeline_cmd->parsed()) return run_pipeline_cmd(pipeline_opt);
        if (simulate_cmd->parsed()) return run_simulate(generator, simulate_opt);
        if (evaluate_cmd->parsed()) return run_evaluate(eval_a, eval_b, eval_output_dir);
    } catch (const ContractViolation& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const ParseError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
    return 2;
}
