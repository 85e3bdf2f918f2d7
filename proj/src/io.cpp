#include "riemgauss/io.hpp"

#include <fstream>
#include <sstream>

namespace riemgauss::io {

namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(std::string(what) + ": " + e.what());
    }
}

json header(const std::string& kind) { return json{{"schema_version", kSchemaVersion}, {"kind", kind}}; }

ManifoldId manifold_field(const json& j) { return ManifoldId::parse(j.at("manifold").get<std::string>()); }

}  // namespace

json to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ValidationError("complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
        rows.push_back(row);
    }
    return rows;
}

CMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("matrix must be a non-empty list of rows");
    const size_t r = j.size();
    const size_t c = j[0].size();
    CMatrix m(r, c);
    for (size_t i = 0; i < r; ++i) {
        if (!j[i].is_array() || j[i].size() != c) throw ValidationError("matrix rows differ in length");
        for (size_t k = 0; k < c; ++k) m(i, k) = complex_from_json(j[i][k]);
    }
    if (!m.allFinite()) throw ValidationError("matrix has non-finite entries");
    return m;
}

namespace {

json toeplitz_to_json(const ToeplitzCoords& c) {
    json a = json::array();
    for (const Complex& x : c.alphas) a.push_back(to_json(x));
    return json{{"r", c.r}, {"alphas", a}};
}

ToeplitzCoords toeplitz_from_json(const json& j, int n) {
    ToeplitzCoords c;
    if (j.contains("matrix")) {
        c = matrix_to_coords(ToeplitzMatrix::from_dense(matrix_from_json(j.at("matrix"))));
    } else {
        c.r = j.at("r").get<double>();
        for (const auto& a : j.at("alphas")) c.alphas.push_back(complex_from_json(a));
    }
    if (c.n() != n) throw ValidationError("Toeplitz point has the wrong size");
    validate(c);
    return c;
}

}  // namespace

json point_to_json(const ManifoldPoint& x) {
    if (auto* h = std::get_if<HermitianPD>(&x)) return json{{"matrix", to_json(h->mat())}};
    if (auto* t = std::get_if<ToeplitzCoords>(&x)) return toeplitz_to_json(*t);
    const auto& b = std::get<BlockToeplitzCoords>(x);
    json om = json::array();
    for (const CMatrix& o : b.omegas) om.push_back(to_json(o));
    return json{{"p", toeplitz_to_json(b.p)}, {"omegas", om}};
}

ManifoldPoint point_from_json(const json& j, const ManifoldId& m) {
    return guarded("point", [&]() -> ManifoldPoint {
        switch (m.kind) {
            case ManifoldId::Kind::Hpd: {
                HermitianPD y(matrix_from_json(j.at("matrix")));
                if (y.n() != m.n) throw ValidationError("HPD point has the wrong size");
                return y;
            }
            case ManifoldId::Kind::Toeplitz: return toeplitz_from_json(j, m.n);
            case ManifoldId::Kind::BlockToeplitz: {
                BlockToeplitzCoords c;
                if (j.contains("matrix")) {
                    c = block_matrix_to_coords(matrix_from_json(j.at("matrix")), m.N);
                } else {
                    c.p = toeplitz_from_json(j.at("p"), m.N);
                    for (const auto& o : j.at("omegas")) c.omegas.push_back(matrix_from_json(o));
                }
                if (c.n() != m.n || c.N() != m.N) throw ValidationError("block-Toeplitz point has the wrong shape");
                validate(c);
                return c;
            }
            case ManifoldId::Kind::SiegelDisc: break;
        }
        throw ValidationError("no point type for manifold " + m.to_string());
    });
}

json to_json(const Dataset& d) {
    json j = header("dataset");
    j["manifold"] = d.manifold.to_string();
    json pts = json::array();
    for (const auto& p : d.points) pts.push_back(point_to_json(p));
    j["points"] = pts;
    if (d.labels) j["labels"] = *d.labels;
    return j;
}

Dataset dataset_from_json(const json& j) {
    check_header(j, "dataset");
    return guarded("dataset", [&] {
        Dataset d;
        d.manifold = manifold_field(j);
        for (const auto& p : j.at("points")) d.points.push_back(point_from_json(p, d.manifold));
        if (j.contains("labels")) {
            d.labels = j.at("labels").get<std::vector<int>>();
            if (d.labels->size() != d.points.size()) throw ValidationError("dataset: labels and points differ in length");
        }
        return d;
    });
}

json to_json(const ZTable& z) {
    json j = header("ztable");
    j["manifold"] = z.manifold.to_string();
    j["method"] = z.method;
    j["seed"] = z.seed;
    j["constant_dropped"] = z.constant_dropped;
    j["sigma"] = z.sigma;
    j["log_z"] = z.log_z;
    j["psi_prime"] = z.psi_prime;
    j["stderr_log_z"] = z.stderr_log_z;
    j["stderr_psi_prime"] = z.stderr_psi_prime;
    j["mc_samples"] = z.mc_samples;
    return j;
}

ZTable ztable_from_json(const json& j) {
    check_header(j, "ztable");
    ZTable z = guarded("ztable", [&] {
        ZTable t;
        t.manifold = manifold_field(j);
        t.method = j.at("method").get<std::string>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.constant_dropped = j.at("constant_dropped").get<bool>();
        t.sigma = j.at("sigma").get<std::vector<double>>();
        t.log_z = j.at("log_z").get<std::vector<double>>();
        t.psi_prime = j.at("psi_prime").get<std::vector<double>>();
        t.stderr_log_z = j.at("stderr_log_z").get<std::vector<double>>();
        t.stderr_psi_prime = j.at("stderr_psi_prime").get<std::vector<double>>();
        t.mc_samples = j.at("mc_samples").get<std::vector<std::int64_t>>();
        return t;
    });
    z.check();
    return z;
}

json to_json(const GaussianParams& p) {
    json j = header("gaussian_params");
    j["manifold"] = manifold_of(p.center).to_string();
    j["center"] = point_to_json(p.center);
    j["sigma"] = p.sigma;
    return j;
}

GaussianParams params_from_json(const json& j) {
    check_header(j, "gaussian_params");
    return guarded("gaussian_params", [&] {
        ManifoldId m = manifold_field(j);
        GaussianParams p{point_from_json(j.at("center"), m), j.at("sigma").get<double>()};
        if (!(p.sigma > 0.0)) throw ValidationError("sigma must be positive");
        return p;
    });
}

json to_json(const FitReport& r) {
    json j = header("fit_report");
    j["manifold"] = manifold_of(r.params.center).to_string();
    j["center"] = point_to_json(r.params.center);
    j["sigma"] = r.params.sigma;
    j["dispersion"] = r.dispersion;
    j["iterations"] = r.iterations;
    j["gradient_norm"] = r.gradient_norm;
    j["eta_solver_residual"] = r.eta_solver_residual;
    return j;
}

FitReport fit_report_from_json(const json& j) {
    check_header(j, "fit_report");
    return guarded("fit_report", [&] {
        ManifoldId m = manifold_field(j);
        FitReport r;
        r.params = {point_from_json(j.at("center"), m), j.at("sigma").get<double>()};
        r.dispersion = j.at("dispersion").get<double>();
        r.iterations = j.at("iterations").get<int>();
        r.gradient_norm = j.at("gradient_norm").get<double>();
        r.eta_solver_residual = j.at("eta_solver_residual").get<double>();
        return r;
    });
}

json to_json(const MixtureModel& m, const std::string& ztable_ref) {
    json j = header("mixture_model");
    j["manifold"] = m.manifold.to_string();
    j["weights"] = m.weights;
    json comps = json::array();
    for (const auto& c : m.components) comps.push_back(json{{"center", point_to_json(c.center)}, {"sigma", c.sigma}});
    j["components"] = comps;
    j["ztable"] = ztable_ref;
    return j;
}

MixtureModel mixture_from_json(const json& j, std::string* ztable_ref) {
    check_header(j, "mixture_model");
    MixtureModel m = guarded("mixture_model", [&] {
        MixtureModel t;
        t.manifold = manifold_field(j);
        t.weights = j.at("weights").get<std::vector<double>>();
        for (const auto& c : j.at("components"))
            t.components.push_back({point_from_json(c.at("center"), t.manifold), c.at("sigma").get<double>()});
        if (ztable_ref) *ztable_ref = j.at("ztable").get<std::string>();
        return t;
    });
    validate(m);
    return m;
}

void check_header(const json& j, const std::string& kind) {
    if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_string())
        throw ValidationError("missing schema_version");
    std::string v = j["schema_version"].get<std::string>();
    if (v.substr(0, v.find('.')) != "1") throw ValidationError("unsupported schema_version " + v);
    if (!j.contains("kind") || j["kind"] != kind) throw ValidationError("expected a '" + kind + "' file");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ValidationError(path + ": invalid JSON: " + e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, dump(j)); }

}  // namespace riemgauss::io
