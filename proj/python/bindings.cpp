#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "riemgauss/io.hpp"

namespace py = pybind11;
using namespace riemgauss;

namespace {

std::string ztable_json(const std::string& manifold, const std::vector<double>& grid, std::int64_t samples,
                        std::uint64_t seed, int threads) {
    ZTable z = build_ztable(ManifoldId::parse(manifold), grid.empty() ? default_sigma_grid() : grid,
                            McConfig{samples, seed, threads});
    return io::dump(io::to_json(z));
}

std::string sample_json(const std::string& params, int count, std::uint64_t seed) {
    GaussianParams p = io::params_from_json(io::json::parse(params));
    Rng rng(seed);
    return io::dump(io::to_json(sample(p, count, rng)));
}

std::string fit_json(const std::string& data, const std::string& table) {
    Dataset d = io::dataset_from_json(io::json::parse(data));
    ZTable z = io::ztable_from_json(io::json::parse(table));
    return io::dump(io::to_json(mle_fit(d, z)));
}

py::tuple mixture_json(const std::string& data, const std::string& table, int kmax, std::uint64_t seed, int restarts) {
    Dataset d = io::dataset_from_json(io::json::parse(data));
    ZTable z = io::ztable_from_json(io::json::parse(table));
    EmConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    BicSelection sel = select_by_bic(d, kmax, z, cfg);
    std::vector<double> bics;
    for (const auto& r : sel.rows) bics.push_back(r.bic);
    return py::make_tuple(io::dump(io::to_json(sel.fits[sel.best_k - 1].model, "")), sel.best_k, bics);
}

std::vector<int> classify_json(const std::string& data, const std::string& model, const std::string& table) {
    Dataset d = io::dataset_from_json(io::json::parse(data));
    MixtureModel m = io::mixture_from_json(io::json::parse(model));
    ZTable z = io::ztable_from_json(io::json::parse(table));
    std::vector<int> out;
    for (const auto& x : d.points) out.push_back(classify(x, m, z));
    return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"riemgauss"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(rc, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_riemgauss, m) {
    m.doc() = "Riemannian Gaussian distributions on HPD, Toeplitz and block-Toeplitz matrices";

    static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
    static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
    static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            switch (e.kind()) {
                case ErrorKind::Validation: PyErr_SetString(validation.ptr(), e.what()); return;
                case ErrorKind::Numerical: PyErr_SetString(numerical.ptr(), e.what()); return;
                case ErrorKind::Io: PyErr_SetString(io_error.ptr(), e.what()); return;
            }
        }
    });

    m.def("hpd_distance", [](const CMatrix& x, const CMatrix& y) { return hpd_distance(HermitianPD(x), HermitianPD(y)); });
    m.def("hpd_logZ_closed_form", &hpd_logZ_closed_form, py::arg("n"), py::arg("sigma"));
    m.def(
        "hpd_z_montecarlo",
        [](int n, double sigma, std::int64_t samples, std::uint64_t seed) {
            McEstimate e = hpd_z_montecarlo(n, sigma, McConfig{samples, seed, 1});
            return py::dict(py::arg("log_z") = e.log_z, py::arg("stderr_log_z") = e.stderr_log_z,
                            py::arg("psi_prime") = e.psi_prime, py::arg("stderr_psi_prime") = e.stderr_psi_prime);
        },
        py::arg("n"), py::arg("sigma"), py::arg("samples") = 200000, py::arg("seed") = 1);

    m.def(
        "toeplitz_to_coords",
        [](const CVector& col) {
            ToeplitzCoords c = matrix_to_coords(ToeplitzMatrix{col});
            return py::make_tuple(c.r, c.alphas);
        },
        py::arg("first_column"));
    m.def(
        "toeplitz_from_coords",
        [](double r, const std::vector<Complex>& alphas) { return CVector(coords_to_matrix({r, alphas}).col); },
        py::arg("r"), py::arg("alphas"));
    m.def(
        "toeplitz_distance",
        [](double r1, const std::vector<Complex>& a1, double r2, const std::vector<Complex>& a2) {
            return toeplitz_distance({r1, a1}, {r2, a2});
        },
        py::arg("r1"), py::arg("alphas1"), py::arg("r2"), py::arg("alphas2"));
    m.def("toeplitz_logZ", &toeplitz_logZ, py::arg("n"), py::arg("sigma"));
    m.def("toeplitz_psi_prime", &toeplitz_psi_prime, py::arg("n"), py::arg("sigma"));

    m.def(
        "block_to_coords",
        [](const CMatrix& t, int N) {
            BlockToeplitzCoords c = block_matrix_to_coords(t, N);
            return py::make_tuple(c.p.r, c.p.alphas, c.omegas);
        },
        py::arg("matrix"), py::arg("N"));
    m.def(
        "block_from_coords",
        [](double r, const std::vector<Complex>& alphas, const std::vector<CMatrix>& omegas) {
            return block_coords_to_matrix(BlockToeplitzCoords{{r, alphas}, omegas});
        },
        py::arg("r"), py::arg("alphas"), py::arg("omegas"));
    m.def("siegel_distance", &siegel_distance, py::arg("phi"), py::arg("psi"));
    m.def("takagi", [](const CMatrix& w) {
        Takagi t = takagi(w);
        return py::make_tuple(t.theta, t.s);
    });

    m.def("build_ztable", &ztable_json, py::arg("manifold"), py::arg("grid") = std::vector<double>{},
          py::arg("samples") = 200000, py::arg("seed") = 1, py::arg("threads") = 1,
          "Z-table as a JSON string; an empty grid selects the default one.");
    m.def("sample", &sample_json, py::arg("params_json"), py::arg("count"), py::arg("seed") = 1);
    m.def("fit", &fit_json, py::arg("data_json"), py::arg("ztable_json"));
    m.def("mixture", &mixture_json, py::arg("data_json"), py::arg("ztable_json"), py::arg("kmax") = 3,
          py::arg("seed") = 1, py::arg("restarts") = 5, "Returns (model_json, selected_K, bic_per_K).");
    m.def("classify", &classify_json, py::arg("data_json"), py::arg("model_json"), py::arg("ztable_json"));
    m.def("run_cli", &run_cli, py::arg("args"), "Runs the command line in-process; returns (exit_code, stdout, stderr).");
}
