#include "sfspline/model_io.hpp"

#include <fstream>

#include "json.hpp"

#include "sfspline/errors.hpp"

namespace sfs {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "sfspline-model";
constexpr int kVersion = 1;

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vector vector_from_json(const json& arr, const char* field) {
    if (!arr.is_array())
        throw io_error(std::string("model field '") + field + "' is not an array");
    Vector v(static_cast<Index>(arr.size()));
    Index i = 0;
    for (const auto& e : arr) {
        if (!e.is_number())
            throw io_error(std::string("model field '") + field +
                           "' holds a non-numeric entry");
        v(i++) = e.get<double>();
    }
    return v;
}

}  // namespace

void save_model(const std::string& path, const FittedSpline& model) {
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["kernel"] = {{"family", to_string(model.spec.family)},
                   {"d", model.spec.d},
                   {"null_dim", model.spec.null_dim}};
    j["lambda"] = model.lambda;

    json basis = json::array();
    for (Index i = 0; i < model.basis.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < model.basis.cols(); ++k)
            row.push_back(model.basis(i, k));
        basis.push_back(std::move(row));
    }
    j["basis"] = std::move(basis);
    j["null_coef"] = vector_to_json(model.null_coef);
    j["kernel_coef"] = vector_to_json(model.kernel_coef);
    j["diagnostics"] = {{"edf", model.diag.edf},
                        {"gcv", model.diag.gcv},
                        {"fit_seconds", model.diag.fit_seconds},
                        {"jitter", model.diag.jitter},
                        {"q_requested", model.diag.q_requested},
                        {"q_eff", model.diag.q_eff}};

    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw io_error("failed while writing '" + path + "'");
}

FittedSpline load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open model file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw io_error("model file '" + path + "' is not valid JSON: " + e.what());
    }

    try {
        if (j.value("format", "") != kFormat)
            throw io_error("'" + path + "' is not an " + kFormat + " record");
        if (j.value("version", -1) != kVersion)
            throw io_error("model version " + j["version"].dump() +
                           " is not supported (expected " +
                           std::to_string(kVersion) + ")");

        const json& k = j.at("kernel");
        FittedSpline model;
        model.spec = kernel_spec_from_string(k.at("family").get<std::string>(),
                                             k.at("d").get<Index>());
        if (model.spec.null_dim != k.at("null_dim").get<Index>())
            throw io_error("model null_dim disagrees with its kernel family");

        const json& basis = j.at("basis");
        if (!basis.is_array()) throw io_error("model field 'basis' is not an array");
        model.basis.resize(static_cast<Index>(basis.size()), model.spec.d);
        Index r = 0;
        for (const auto& row : basis) {
            if (!row.is_array() ||
                static_cast<Index>(row.size()) != model.spec.d)
                throw io_error("model basis row " + std::to_string(r) +
                               " does not have d = " +
                               std::to_string(model.spec.d) + " coordinates");
            Index c = 0;
            for (const auto& e : row) model.basis(r, c++) = e.get<double>();
            ++r;
        }
        if ((model.basis.array() < 0.0).any() || (model.basis.array() > 1.0).any())
            throw io_error("model basis points leave the unit cube");

        model.null_coef = vector_from_json(j.at("null_coef"), "null_coef");
        model.kernel_coef = vector_from_json(j.at("kernel_coef"), "kernel_coef");
        if (model.null_coef.size() != model.spec.null_dim)
            throw io_error("model null_coef length disagrees with the kernel");
        if (model.kernel_coef.size() != model.basis.rows())
            throw io_error("model kernel_coef length disagrees with the basis");

        model.lambda = j.at("lambda").get<double>();
        if (!(model.lambda > 0.0))
            throw io_error("model lambda must be positive");

        const json& diag = j.at("diagnostics");
        model.diag.edf = diag.at("edf").get<double>();
        model.diag.gcv = diag.at("gcv").get<double>();
        model.diag.fit_seconds = diag.at("fit_seconds").get<double>();
        model.diag.jitter = diag.at("jitter").get<double>();
        model.diag.q_requested = diag.at("q_requested").get<Index>();
        model.diag.q_eff = diag.at("q_eff").get<Index>();
        return model;
    } catch (const json::exception& e) {
        throw io_error("model file '" + path + "' is malformed: " + e.what());
    } catch (const invalid_input& e) {
        throw io_error("model file '" + path + "' is malformed: " + e.what());
    }
}

}  // namespace sfs
