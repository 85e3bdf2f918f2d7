#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <map>
#include <sstream>
#include <string>

#include "riemgauss/io.hpp"

namespace riemgauss::cli {

namespace {

struct Globals {
    std::uint64_t seed = 1;
    int threads = 1;
    std::int64_t mc_samples = 200000;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_grid(const std::string& spec) {
    if (spec.empty()) return default_sigma_grid();
    double lo = 0, hi = 0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(spec);
    if (!(is >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || !is.eof())
        throw ValidationError("bad --grid '" + spec + "' (expected lo:hi:count)");
    return log_spaced_grid(lo, hi, count);
}

void cmd_ztable(const Globals& g, const std::string& manifold, const std::string& grid, const std::string& out,
                const std::string& curve, std::ostream& log) {
    ManifoldId m = ManifoldId::parse(manifold);
    McConfig mc{g.mc_samples, g.seed, g.threads};
    ZTable z = build_ztable(m, parse_grid(grid), mc);
    io::write_json_file(out, io::to_json(z));
    if (!curve.empty()) {
        std::ostringstream csv;
        csv << "sigma,eta,log_z,psi_prime,phi_of_psi_prime\n";
        for (size_t i = 0; i < z.sigma.size(); ++i) {
            double s = z.sigma[i];
            csv << fmt(s) << ',' << fmt(-1.0 / (2 * s * s)) << ',' << fmt(z.log_z[i]) << ',' << fmt(z.psi_prime[i]) << ','
                << fmt(z.phi(z.psi_prime[i])) << '\n';
        }
        io::write_text_file(curve, csv.str());
    }
    log << "wrote " << m.to_string() << " Z-table (" << z.method << ", " << z.sigma.size() << " points) to " << out << "\n";
}

void cmd_sample(const Globals& g, const std::string& params, int count, const std::string& out, std::ostream& log) {
    GaussianParams p = io::params_from_json(io::read_json_file(params));
    Rng rng(g.seed);
    SampleDiagnostics diag;
    Dataset d = sample(p, count, rng, MhConfig{}, &diag);
    if (!diag.ok) {
        std::ostringstream os;
        os << "sampler acceptance rate outside [0.1, 0.7] (min " << diag.min_acceptance << ", max "
           << diag.max_acceptance << ")";
        throw NumericalError(os.str());
    }
    io::write_json_file(out, io::to_json(d));
    log << "wrote " << d.points.size() << " samples to " << out << "\n";
}

ZTable load_table(const std::string& path, const ManifoldId& m) {
    ZTable z = io::ztable_from_json(io::read_json_file(path));
    if (z.manifold != m)
        throw ValidationError("Z-table " + path + " is for " + z.manifold.to_string() + ", data are on " + m.to_string());
    return z;
}

void cmd_fit(const Globals& g, const std::string& data, const std::string& table, const std::string& out,
             std::ostream& log) {
    Dataset d = io::dataset_from_json(io::read_json_file(data));
    ZTable z = load_table(table, d.manifold);
    BarycentreConfig bc;
    bc.threads = g.threads;
    FitReport r = mle_fit(d, z, bc);
    io::write_json_file(out, io::to_json(r));
    log << "sigma = " << fmt(r.params.sigma) << ", dispersion = " << fmt(r.dispersion) << "\n";
}

void cmd_mixture(const Globals& g, const std::string& data, const std::string& table, int kmax, int restarts,
                 int max_iter, const std::string& out, const std::string& bic_out, std::ostream& log) {
    Dataset d = io::dataset_from_json(io::read_json_file(data));
    ZTable z = load_table(table, d.manifold);
    EmConfig cfg;
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    cfg.barycentre.threads = g.threads;
    cfg.restarts = restarts;
    cfg.max_iter = max_iter;
    BicSelection sel = select_by_bic(d, kmax, z, cfg);
    const EmResult& best = sel.fits[sel.best_k - 1];
    io::write_json_file(out, io::to_json(best.model, table));
    if (!bic_out.empty()) {
        std::ostringstream csv;
        csv << "K,loglik,df,bic\n";
        for (const auto& r : sel.rows) csv << r.K << ',' << fmt(r.loglik) << ',' << r.df << ',' << fmt(r.bic) << '\n';
        io::write_text_file(bic_out, csv.str());
    }
    for (size_t k = 0; k < best.degenerate.size(); ++k)
        if (best.degenerate[k]) log << "warning: component " << k << " has sigma clamped to the Z-table range\n";
    log << "selected K = " << sel.best_k << "\n";
}

void cmd_classify(const std::string& data, const std::string& model, const std::string& table_override,
                  const std::string& out, const std::string& confusion, std::ostream& log) {
    Dataset d = io::dataset_from_json(io::read_json_file(data));
    std::string ref;
    MixtureModel m = io::mixture_from_json(io::read_json_file(model), &ref);
    if (m.manifold != d.manifold) throw ValidationError("model and data are on different manifolds");
    ZTable z = load_table(table_override.empty() ? ref : table_override, d.manifold);
    std::vector<int> labels;
    std::ostringstream csv;
    csv << "index,label\n";
    for (size_t i = 0; i < d.points.size(); ++i) {
        labels.push_back(classify(d.points[i], m, z));
        csv << i << ',' << labels.back() << '\n';
    }
    io::write_text_file(out, csv.str());
    if (d.labels && !confusion.empty()) {
        std::map<int, std::map<int, int>> counts;
        int max_pred = m.K() - 1;
        for (size_t i = 0; i < labels.size(); ++i) ++counts[(*d.labels)[i]][labels[i]];
        std::ostringstream c;
        c << "true";
        for (int k = 0; k <= max_pred; ++k) c << ",pred_" << k;
        c << '\n';
        for (const auto& [t, row] : counts) {
            c << t;
            for (int k = 0; k <= max_pred; ++k) {
                auto it = row.find(k);
                c << ',' << (it == row.end() ? 0 : it->second);
            }
            c << '\n';
        }
        io::write_text_file(confusion, c.str());
    } else if (!d.labels && !confusion.empty()) {
        log << "dataset has no labels; confusion matrix not written\n";
    }
    log << "classified " << labels.size() << " points\n";
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Validation: return 2;
        case ErrorKind::Numerical: return 3;
        case ErrorKind::Io: return 4;
    }
    return 3;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Riemannian Gaussian distributions on covariance and Toeplitz spaces", "riemgauss"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads (1 = bit-reproducible)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--mc-samples", g.mc_samples, "Monte Carlo samples per Z-table entry")
        ->check(CLI::Range(std::int64_t{1000}, std::int64_t{1} << 40))
        ->capture_default_str();

    std::string manifold, grid, out_path, curve, params, data, table, model, bic_out, confusion;
    int count = 0, kmax = 3, restarts = 5, max_iter = 300;

    auto* zt = app.add_subcommand("ztable", "tabulate log Z and psi' on a sigma grid");
    zt->add_option("--manifold", manifold, "hpd:<n> | toeplitz:<n> | block:<n>x<N> | siegel:<N>")->required();
    zt->add_option("--grid", grid, "lo:hi:count, log-spaced (default 0.05:3:60)");
    zt->add_option("--out", out_path, "table JSON")->required();
    zt->add_option("--curve", curve, "CSV curve output");

    auto* sm = app.add_subcommand("sample", "draw from G(center, sigma)");
    sm->add_option("--params", params, "gaussian_params JSON")->required();
    sm->add_option("--count", count, "number of samples")->required()->check(CLI::NonNegativeNumber);
    sm->add_option("--out", out_path, "dataset JSON")->required();

    auto* ft = app.add_subcommand("fit", "maximum-likelihood fit of one Gaussian");
    ft->add_option("--data", data, "dataset JSON")->required();
    ft->add_option("--ztable", table, "Z-table JSON")->required();
    ft->add_option("--out", out_path, "fit report JSON")->required();

    auto* mx = app.add_subcommand("mixture", "EM mixture fit with BIC order selection");
    mx->add_option("--data", data, "dataset JSON")->required();
    mx->add_option("--ztable", table, "Z-table JSON")->required();
    mx->add_option("--kmax", kmax, "largest K tried")->check(CLI::PositiveNumber)->capture_default_str();
    mx->add_option("--restarts", restarts, "EM restarts per K")->check(CLI::PositiveNumber)->capture_default_str();
    mx->add_option("--max-iter", max_iter, "EM iterations per restart")->check(CLI::PositiveNumber)->capture_default_str();
    mx->add_option("--out", out_path, "mixture model JSON")->required();
    mx->add_option("--bic", bic_out, "BIC table CSV");

    auto* cl = app.add_subcommand("classify", "Bayes classification with a fitted mixture");
    cl->add_option("--data", data, "dataset JSON")->required();
    cl->add_option("--model", model, "mixture model JSON")->required();
    cl->add_option("--ztable", table, "override the model's Z-table reference");
    cl->add_option("--out", out_path, "labels CSV")->required();
    cl->add_option("--confusion", confusion, "confusion matrix CSV (needs labelled data)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*zt) cmd_ztable(g, manifold, grid, out_path, curve, out);
        else if (*sm) cmd_sample(g, params, count, out_path, out);
        else if (*ft) cmd_fit(g, data, table, out_path, out);
        else if (*mx) cmd_mixture(g, data, table, kmax, restarts, max_iter, out_path, bic_out, out);
        else if (*cl) cmd_classify(data, model, table, out_path, confusion, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace riemgauss::cli
