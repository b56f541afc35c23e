#include "smallball/io.hpp"

#include <cstdio>

namespace smallball {

std::string full_digits(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& sp) {
    os << "k,mu,lambda\n";
    for (std::size_t k = 0; k < sp.size(); ++k) {
        os << (k + 1) << ',' << full_digits(sp.mu[k]) << ','
           << full_digits(sp.lambda(k)) << '\n';
    }
}

void write_roots_csv(std::ostream& os, const RootList& roots) {
    os << "k,zeta,residual,bracket_width\n";
    for (std::size_t k = 0; k < roots.zeta.size(); ++k) {
        os << (k + 1) << ',' << full_digits(roots.zeta[k]) << ','
           << full_digits(roots.residual[k]) << ','
           << full_digits(roots.bracket_width[k]) << '\n';
    }
}

void write_report_csv(std::ostream& os, const std::vector<SmallBallReport>& rows) {
    os << "process,beta_or_alpha,epsilon,p_exact,p_mc,mc_stderr,p_asymptotic,ratio\n";
    auto cell = [](const std::optional<double>& v) {
        return v ? full_digits(*v) : std::string();
    };
    for (const SmallBallReport& r : rows) {
        os << r.process << ',' << full_digits(r.beta_or_alpha) << ','
           << full_digits(r.epsilon) << ',' << cell(r.p_exact) << ','
           << cell(r.p_mc) << ',' << cell(r.mc_stderr) << ','
           << cell(r.p_asymptotic) << ',' << cell(r.ratio) << '\n';
    }
}

void write_kernel_grid_csv(std::ostream& os, const Kernel& k, int grid) {
    os << "t,s,value\n";
    for (int i = 0; i < grid; ++i) {
        const double t = static_cast<double>(i) / (grid - 1);
        for (int j = 0; j < grid; ++j) {
            const double s = static_cast<double>(j) / (grid - 1);
            os << full_digits(t) << ',' << full_digits(s) << ','
               << full_digits(k.eval(t, s)) << '\n';
        }
    }
}

nlohmann::json spectrum_json(const Spectrum& sp) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < sp.size(); ++k) {
        rows.push_back({{"k", k + 1}, {"mu", sp.mu[k]}, {"lambda", sp.lambda(k)}});
    }
    return {{"provenance", provenance_name(sp.provenance)},
            {"zero_modes", sp.zero_modes},
            {"numbering_shift", sp.numbering_shift},
            {"truncation", sp.truncation},
            {"eigenvalues", rows}};
}

nlohmann::json roots_json(const RootList& roots) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < roots.zeta.size(); ++k) {
        rows.push_back({{"k", k + 1},
                        {"zeta", roots.zeta[k]},
                        {"residual", roots.residual[k]},
                        {"bracket_width", roots.bracket_width[k]}});
    }
    return rows;
}

nlohmann::json report_json(const std::vector<SmallBallReport>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const SmallBallReport& r : rows) {
        nlohmann::json row = {{"process", r.process},
                              {"beta_or_alpha", r.beta_or_alpha},
                              {"epsilon", r.epsilon}};
        auto put = [&row](const char* key, const std::optional<double>& v) {
            if (v) row[key] = *v;
            else row[key] = nullptr;
        };
        put("p_exact", r.p_exact);
        put("p_mc", r.p_mc);
        put("mc_stderr", r.mc_stderr);
        put("p_asymptotic", r.p_asymptotic);
        put("ratio", r.ratio);
        arr.push_back(row);
    }
    return arr;
}

nlohmann::json envelope(const std::string& command, nlohmann::json config,
                        nlohmann::json data) {
    return {{"version", 1},
            {"command", command},
            {"config", std::move(config)},
            {"data", std::move(data)}};
}

} // namespace smallball
