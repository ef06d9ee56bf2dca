#include "ppmix/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ppmix/dataset.hpp"

namespace ppmix {
namespace {

using nlohmann::json;

json vector_to_json(const VectorXd& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

VectorXd vector_from_json(const json& j) {
    VectorXd out(j.size());
    int i = 0;
    for (const auto& value : j) out[i++] = value.get<double>();
    return out;
}

json matrix_to_flat_json(const MatrixXd& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    }
    return out;
}

MatrixXd matrix_from_flat_json(const json& j, int rows, int cols) {
    if (static_cast<int>(j.size()) != rows * cols) {
        throw ParseError("flat matrix has wrong length");
    }
    MatrixXd out(rows, cols);
    int i = 0;
    for (const auto& value : j) {
        out(i / cols, i % cols) = value.get<double>();
        ++i;
    }
    return out;
}

json model_to_json(const MixtureModel& model) {
    json j;
    j["n_components"] = model.n_components;
    j["dim"] = model.dim;
    j["family"] = family_name(model.family);
    j["weights"] = vector_to_json(model.weights);
    json means = json::array();
    for (const VectorXd& mean : model.means) means.push_back(vector_to_json(mean));
    j["means"] = std::move(means);
    json covs = json::array();
    for (const MatrixXd& cov : model.covariances) {
        covs.push_back(matrix_to_flat_json(cov));
    }
    j["covariances"] = std::move(covs);
    return j;
}

MixtureModel model_from_json(const json& j) {
    MixtureModel model;
    model.n_components = j.at("n_components").get<int>();
    model.dim = j.at("dim").get<int>();
    model.family = family_from_name(j.at("family").get<std::string>());
    model.weights = vector_from_json(j.at("weights"));
    for (const auto& mean : j.at("means")) {
        model.means.push_back(vector_from_json(mean));
    }
    for (const auto& cov : j.at("covariances")) {
        model.covariances.push_back(matrix_from_flat_json(cov, model.dim, model.dim));
    }
    model.validate();
    return model;
}

json parse_or_throw(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON");
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

std::string fit_to_json(const FitReport& fit) {
    json j = model_to_json(fit.model);
    j["log_likelihood"] = fit.log_likelihood;
    j["bic"] = fit.bic;
    j["n_parameters"] = fit.n_parameters;
    j["n_iterations"] = fit.n_iterations;
    j["converged"] = fit.converged;
    return j.dump(2) + "\n";
}

FitReport fit_from_json(const std::string& text) {
    try {
        json j = parse_or_throw(text);
        FitReport fit;
        fit.model = model_from_json(j);
        fit.log_likelihood = j.at("log_likelihood").get<double>();
        fit.bic = j.at("bic").get<double>();
        fit.n_parameters = j.at("n_parameters").get<int>();
        fit.n_iterations = j.value("n_iterations", 0);
        fit.converged = j.value("converged", false);
        return fit;
    } catch (const json::exception& err) {
        throw ParseError(std::string("invalid model file: ") + err.what());
    } catch (const ContractViolation& err) {
        throw ParseError(std::string("invalid model file: ") + err.what());
    }
}

void save_fit(const std::string& path, const FitReport& fit) {
    write_text_file(path, fit_to_json(fit));
}

FitReport load_fit(const std::string& path) { return fit_from_json(read_file(path)); }

std::string projection_to_json(const PpResult& pp) {
    json j;
    j["dim_in"] = pp.basis.rows;
    j["dim_out"] = pp.basis.cols;
    j["basis"] = matrix_to_flat_json(pp.basis.matrix);
    j["angles"] = vector_to_json(pp.angles);
    j["negentropy"] = pp.negentropy;
    j["entropy"] = pp.entropy;
    j["gaussian_entropy"] = pp.gaussian_entropy;
    j["history"] = pp.history;
    j["generations_run"] = pp.generations_run;
    j["projected"] = model_to_json(pp.projected);
    return j.dump(2) + "\n";
}

PpResult projection_from_json(const std::string& text) {
    try {
        json j = parse_or_throw(text);
        PpResult pp;
        const int rows = j.at("dim_in").get<int>();
        const int cols = j.at("dim_out").get<int>();
        pp.basis = make_basis(matrix_from_flat_json(j.at("basis"), rows, cols));
        pp.angles = vector_from_json(j.at("angles"));
        pp.negentropy = j.at("negentropy").get<double>();
        pp.entropy = j.at("entropy").get<double>();
        pp.gaussian_entropy = j.at("gaussian_entropy").get<double>();
        pp.history = j.value("history", std::vector<double>{});
        pp.generations_run = j.value("generations_run", 0);
        pp.projected = model_from_json(j.at("projected"));
        return pp;
    } catch (const json::exception& err) {
        throw ParseError(std::string("invalid projection file: ") + err.what());
    } catch (const ContractViolation& err) {
        throw ParseError(std::string("invalid projection file: ") + err.what());
    }
}

void save_projection(const std::string& path, const PpResult& pp) {
    write_text_file(path, projection_to_json(pp));
}

PpResult load_projection(const std::string& path) {
    return projection_from_json(read_file(path));
}

std::string modal_to_json(const ModalResult& result) {
    json j;
    json modes = json::array();
    json densities = json::array();
    for (const Mode& mode : result.modes) {
        modes.push_back(vector_to_json(mode.location));
        densities.push_back(std::exp(mode.log_density));
    }
    j["modes"] = std::move(modes);
    j["n_modes"] = result.n_modes();
    j["density_at_modes"] = std::move(densities);
    json assignments = json::array();
    for (int i = 0; i < result.assignments.size(); ++i) {
        assignments.push_back(result.assignments[i]);
    }
    j["assignments"] = std::move(assignments);
    json iterations = json::array();
    for (int i = 0; i < result.ascent.n_iterations.size(); ++i) {
        iterations.push_back(result.ascent.n_iterations[i]);
    }
    j["iterations"] = std::move(iterations);
    if (!result.ascent.paths.empty()) {
        json paths = json::array();
        for (const MatrixXd& path : result.ascent.paths) {
            json steps = json::array();
            for (int s = 0; s < path.rows(); ++s) {
                steps.push_back(vector_to_json(path.row(s).transpose()));
            }
            paths.push_back(std::move(steps));
        }
        j["paths"] = std::move(paths);
    }
    return j.dump(2) + "\n";
}

}  // namespace ppmix
