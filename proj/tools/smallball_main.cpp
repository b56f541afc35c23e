// Command-line front end: spectra, distortion constants, small-ball
// probabilities and a self-test of the cross-validation claims.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smallball/charfn.hpp"
#include "smallball/errors.hpp"
#include "smallball/io.hpp"
#include "smallball/nystrom.hpp"
#include "smallball/smallball.hpp"
#include "smallball/threading.hpp"

namespace {

using namespace smallball;

struct CommonOpts {
    std::string process;
    double alpha = 0.0;
    bool alpha_set = false;
    double beta = 1.0;
    bool beta_set = false;
    bool demeaned = false;
    std::string format = "table";
    std::string output;
};

ProcessSpec parse_process(const CommonOpts& c) {
    std::string name = c.process;
    bool demeaned = c.demeaned;
    const std::string prefix = "demeaned-";
    if (name.rfind(prefix, 0) == 0) {
        demeaned = true;
        name = name.substr(prefix.size());
    }
    ProcessSpec spec;
    if (name == "wiener") spec.family = Family::Wiener;
    else if (name == "brownian-bridge" || name == "bb") spec.family = Family::BrownianBridge;
    else if (name == "xalpha") spec.family = Family::Xalpha;
    else if (name == "ou") spec.family = Family::OU;
    else if (name == "ou0" || name == "ouzero") spec.family = Family::OUZero;
    else if (name == "iou" || name == "integrated-ou") spec.family = Family::IntegratedOU;
    else throw ParameterError("unknown process '" + c.process + "'");
    spec.demeaned = demeaned;
    if (c.alpha_set) spec.alpha = c.alpha;
    if (c.beta_set) spec.beta = c.beta;
    spec.validate();
    return spec;
}

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--process", c.process, "process selector, e.g. demeaned-ou")
        ->required();
    cmd->add_option("--alpha", c.alpha, "xalpha parameter")->each([&c](std::string) {
        c.alpha_set = true;
    });
    cmd->add_option("--beta", c.beta, "OU-family parameter")->each([&c](std::string) {
        c.beta_set = true;
    });
    cmd->add_flag("--demeaned", c.demeaned, "demean the process");
    cmd->add_option("--format", c.format, "table|csv|json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    cmd->add_option("--output", c.output, "write to file instead of stdout");
}

int emit(const CommonOpts& c, const std::string& text) {
    if (c.output.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream os(c.output);
    if (!os) {
        std::cerr << "error: cannot open " << c.output << "\n";
        return 1;
    }
    os << text;
    return 0;
}

std::string table_6sig(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%12.6g", v);
    return buf;
}

nlohmann::json config_json(const ProcessSpec& spec) {
    nlohmann::json j = {{"process", spec.label()}, {"demeaned", spec.demeaned}};
    if (spec.family == Family::Xalpha) j["alpha"] = spec.alpha;
    if (spec.uses_beta()) j["beta"] = spec.beta;
    return j;
}

int run_eigs(const CommonOpts& c, int k_max, int n_nodes,
             const std::string& method, bool compare) {
    const ProcessSpec spec = parse_process(c);

    Spectrum sp;
    std::string used = method;
    if (method == "nystrom") {
        sp = nystrom_spectrum(kernel(spec), n_nodes, k_max).spectrum;
    } else if (method == "charfn") {
        sp = analytic_spectrum(spec, k_max);
    } else {  // auto
        try {
            sp = analytic_spectrum(spec, k_max);
            used = "charfn";
        } catch (const NotApplicableError&) {
            sp = nystrom_spectrum(kernel(spec), n_nodes, k_max).spectrum;
            used = "nystrom";
        }
    }

    std::optional<Spectrum> other;
    if (compare) {
        other = nystrom_spectrum(kernel(spec), n_nodes, k_max).spectrum;
    }

    std::ostringstream os;
    if (c.format == "csv") {
        if (!compare) {
            write_spectrum_csv(os, sp);
        } else {
            os << "k,mu,lambda,mu_nystrom,rel_diff\n";
            for (int k = 0; k < k_max; ++k) {
                const double rel =
                    std::abs(sp.mu[k] - other->mu[k]) / sp.mu[k];
                os << (k + 1) << ',' << full_digits(sp.mu[k]) << ','
                   << full_digits(1.0 / sp.mu[k]) << ','
                   << full_digits(other->mu[k]) << ',' << full_digits(rel)
                   << '\n';
            }
        }
    } else if (c.format == "json") {
        nlohmann::json data = spectrum_json(sp);
        data["method"] = used;
        if (compare) {
            nlohmann::json cmp = nlohmann::json::array();
            double max_rel = 0.0;
            for (int k = 0; k < k_max; ++k) {
                const double rel = std::abs(sp.mu[k] - other->mu[k]) / sp.mu[k];
                max_rel = std::max(max_rel, rel);
                cmp.push_back({{"k", k + 1},
                               {"mu_nystrom", other->mu[k]},
                               {"rel_diff", rel}});
            }
            data["compare"] = cmp;
            data["max_rel_diff"] = max_rel;
        }
        nlohmann::json cfg = config_json(spec);
        cfg["k"] = k_max;
        cfg["n_nodes"] = n_nodes;
        cfg["method"] = used;
        os << envelope("eigs", cfg, data).dump(2) << '\n';
    } else {
        os << "# " << spec.label() << "  method=" << used
           << "  zero_modes=" << sp.zero_modes << "\n";
        os << "   k            mu         lambda";
        if (compare) os << "    mu_nystrom      rel_diff";
        os << "\n";
        double max_rel = 0.0;
        for (int k = 0; k < k_max; ++k) {
            os << std::setw(4) << (k + 1) << table_6sig(sp.mu[k])
               << table_6sig(1.0 / sp.mu[k]);
            if (compare) {
                const double rel = std::abs(sp.mu[k] - other->mu[k]) / sp.mu[k];
                max_rel = std::max(max_rel, rel);
                os << table_6sig(other->mu[k]) << table_6sig(rel);
            }
            os << "\n";
        }
        if (compare) os << "# max relative difference: " << max_rel << "\n";
    }
    return emit(c, os.str());
}

int run_constant(const CommonOpts& c, int K, const std::string& method) {
    const ProcessSpec spec = parse_process(c);
    const DistortionResult r = distortion_constant(
        spec,
        method == "closed" ? DistortionMethod::closed_form
                           : DistortionMethod::product,
        K);

    std::ostringstream os;
    if (c.format == "csv") {
        os << "closed_form,product,abs_diff,K\n";
        os << full_digits(r.closed_form) << ',' << full_digits(r.product)
           << ',' << full_digits(r.abs_diff) << ',' << K << '\n';
    } else if (c.format == "json") {
        nlohmann::json cfg = config_json(spec);
        cfg["K"] = K;
        cfg["method"] = method;
        nlohmann::json data = {{"closed_form", r.closed_form},
                               {"product", r.product},
                               {"partial", r.partial},
                               {"tail_correction", r.tail_correction},
                               {"abs_diff", r.abs_diff},
                               {"trace", r.trace}};
        os << envelope("constant", cfg, data).dump(2) << '\n';
    } else {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "closed form : %.12g\n", r.closed_form);
        os << buf;
        if (method != "closed") {
            std::snprintf(buf, sizeof(buf), "product(K=%d): %.12g\n", K, r.product);
            os << buf;
            std::snprintf(buf, sizeof(buf), "|difference|: %.3g\n", r.abs_diff);
            os << buf;
        }
    }
    return emit(c, os.str());
}

int run_prob(const CommonOpts& c, const std::string& eps_csv,
             const std::string& methods_csv, std::uint64_t samples,
             std::uint64_t seed, bool seed_given, int K) {
    const ProcessSpec spec = parse_process(c);

    std::vector<double> eps_list;
    {
        std::stringstream ss(eps_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (!tok.empty()) eps_list.push_back(std::stod(tok));
        }
    }

    ReportConfig cfg;
    cfg.K_trunc = K;
    cfg.n_samples = samples;
    cfg.seed = seed;
    cfg.with_exact = false;
    cfg.with_mc = false;
    cfg.with_asymptotic = false;
    {
        std::stringstream ss(methods_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok == "imhof") cfg.with_exact = true;
            else if (tok == "mc") cfg.with_mc = true;
            else if (tok == "asymptotic") cfg.with_asymptotic = true;
            else if (!tok.empty()) throw ParameterError("unknown method '" + tok + "'");
        }
    }
    if (cfg.with_mc && !seed_given) {
        throw ParameterError("--seed is required when the mc method is selected");
    }

    const std::vector<SmallBallReport> rows = make_report(spec, eps_list, cfg);

    std::ostringstream os;
    if (c.format == "csv") {
        write_report_csv(os, rows);
    } else if (c.format == "json") {
        nlohmann::json jcfg = config_json(spec);
        jcfg["K_trunc"] = cfg.K_trunc;
        jcfg["n_samples"] = cfg.n_samples;
        jcfg["seed"] = cfg.seed;
        jcfg["methods"] = methods_csv;
        jcfg["eps"] = eps_list;
        os << envelope("prob", jcfg, report_json(rows)).dump(2) << '\n';
    } else {
        os << "     epsilon        p_exact          p_mc     mc_stderr"
              "  p_asymptotic         ratio\n";
        auto cell = [&](const std::optional<double>& v) {
            return v ? table_6sig(*v) : std::string(12, ' ') + "-";
        };
        for (const SmallBallReport& r : rows) {
            os << table_6sig(r.epsilon) << "  " << cell(r.p_exact)
               << cell(r.p_mc) << cell(r.mc_stderr) << cell(r.p_asymptotic)
               << cell(r.ratio) << "\n";
        }
    }
    return emit(c, os.str());
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

int run_selftest() {
    int failures = 0;
    auto check = [&failures](bool ok, const std::string& name,
                             const std::string& detail) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        if (!ok) ++failures;
    };

    // alpha-invariance of the demeaned X_alpha spectra.
    {
        double max_rel = 0.0;
        std::vector<double> alphas = {0.0, 1.0, 2.0, -0.5};
        std::vector<std::vector<double>> spectra;
        for (double a : alphas) {
            NystromOptions opt;
            opt.k_max = 6;
            spectra.push_back(
                nystrom_spectrum(kernel(ProcessSpec::xalpha(a, true)), 600, opt)
                    .spectrum.mu);
        }
        for (std::size_t i = 1; i < spectra.size(); ++i) {
            for (int k = 0; k < 6; ++k) {
                max_rel = std::max(max_rel,
                                   std::abs(spectra[i][k] - spectra[0][k]) /
                                       spectra[0][k]);
            }
        }
        check(max_rel <= 1e-8, "alpha-invariance of demeaned X_alpha spectra",
              "max rel diff " + sci(max_rel));
    }

    // Dual-solver agreement for the demeaned OU families.
    {
        double worst = 0.0;
        for (const ProcessSpec& spec :
             {ProcessSpec::ou(1.0, true), ProcessSpec::ou_zero(1.0, true),
              ProcessSpec::integrated_ou(1.0, true)}) {
            const Spectrum a = analytic_spectrum(spec, 6);
            const Spectrum n = nystrom_spectrum(kernel(spec), 800, 6).spectrum;
            for (int k = 0; k < 6; ++k) {
                worst = std::max(worst, std::abs(a.mu[k] - n.mu[k]) / a.mu[k]);
            }
        }
        check(worst <= 1e-6, "characteristic vs Nystrom spectra (beta=1)",
              "max rel diff " + sci(worst));
    }

    // Distortion products against the closed forms.
    {
        double worst = 0.0;
        for (const ProcessSpec& spec :
             {ProcessSpec::ou(1.0, true), ProcessSpec::ou_zero(1.0, true),
              ProcessSpec::integrated_ou(1.0, true)}) {
            const DistortionResult r =
                distortion_constant(spec, DistortionMethod::product, 200);
            worst = std::max(worst, r.abs_diff);
        }
        check(worst <= 1e-3, "distortion products converge to closed forms",
              "max |product - closed| " + sci(worst));
    }

    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: FAILURES present\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    smallball::apply_thread_cap();

    CLI::App app{"L2 small-ball toolkit for demeaned Green Gaussian processes"};
    app.require_subcommand(1);

    CommonOpts ce, cc, cp;
    int k_max = 10, n_nodes = 2000, K_const = 500, K_prob = 2000;
    std::string eigs_method = "auto", const_method = "both";
    bool compare = false;
    std::string eps_csv, prob_methods = "imhof,asymptotic";
    std::uint64_t samples = 1000000, seed = 0;
    bool seed_given = false;

    CLI::App* eigs = app.add_subcommand("eigs", "KL eigenvalues");
    add_common(eigs, ce);
    eigs->add_option("--k", k_max, "number of eigenvalues");
    eigs->add_option("--n-nodes", n_nodes, "Nystrom subintervals");
    eigs->add_option("--method", eigs_method, "auto|nystrom|charfn")
        ->check(CLI::IsMember({"auto", "nystrom", "charfn"}));
    eigs->add_flag("--compare", compare, "also run Nystrom and diff");

    CLI::App* cst = app.add_subcommand("constant", "distortion constants");
    add_common(cst, cc);
    cst->add_option("--K", K_const, "product truncation");
    cst->add_option("--method", const_method, "closed|product|both")
        ->check(CLI::IsMember({"closed", "product", "both"}));

    CLI::App* prob = app.add_subcommand("prob", "small-ball probabilities");
    add_common(prob, cp);
    prob->add_option("--eps", eps_csv, "comma list of epsilon values")->required();
    prob->add_option("--method", prob_methods, "comma list: imhof,mc,asymptotic");
    prob->add_option("--samples", samples, "Monte Carlo sample count");
    prob->add_option("--seed", seed, "Monte Carlo seed")->each([&seed_given](std::string) {
        seed_given = true;
    });
    prob->add_option("--K", K_prob, "spectrum truncation for the exact path");

    CLI::App* selftest =
        app.add_subcommand("selftest", "run the built-in validation checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eigs->parsed()) return run_eigs(ce, k_max, n_nodes, eigs_method, compare);
        if (cst->parsed()) return run_constant(cc, K_const, const_method);
        if (prob->parsed()) {
            return run_prob(cp, eps_csv, prob_methods, samples, seed, seed_given,
                            K_prob);
        }
        if (selftest->parsed()) return run_selftest();
    } catch (const smallball::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
