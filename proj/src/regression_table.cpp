#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <set>

#include "fuelgeo/econometrics.hpp"
#include "fuelgeo/text.hpp"

namespace fuelgeo {

namespace {

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string with_thousands(std::size_t v) {
    std::string digits = std::to_string(v);
    std::string out;
    const std::size_t lead = digits.size() % 3;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (i - lead) % 3 == 0) out.push_back(',');
        out.push_back(digits[i]);
    }
    return out;
}

struct Grid {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Grid build_grid(std::span<const FeFit> models, const TableLabels& labels) {
    std::vector<std::string> terms;
    for (const auto& m : models) {
        for (const auto& name : m.names) {
            if (std::find(terms.begin(), terms.end(), name) == terms.end()) terms.push_back(name);
        }
    }
    Grid g;
    g.header.push_back("");
    for (std::size_t i = 0; i < models.size(); ++i) g.header.push_back("(" + std::to_string(i + 1) + ")");
    for (const auto& term : terms) {
        const auto it = labels.display.find(term);
        std::vector<std::string> coef{it != labels.display.end() ? it->second : term};
        std::vector<std::string> se{""};
        for (const auto& m : models) {
            if (m.coefficients.count(term)) {
                coef.push_back(fixed3(m.coefficients.at(term)) + significance_stars(m.p_value(term)));
                se.push_back("(" + fixed3(m.standard_errors.at(term)) + ")");
            } else {
                coef.emplace_back();
                se.emplace_back();
            }
        }
        g.rows.push_back(std::move(coef));
        g.rows.push_back(std::move(se));
    }
    std::vector<std::string> r2{"R-squared"};
    std::vector<std::string> nn{"N"};
    for (const auto& m : models) {
        r2.push_back(fixed3(m.r_squared));
        nn.push_back(with_thousands(m.n_observations));
    }
    g.rows.push_back(std::move(r2));
    g.rows.push_back(std::move(nn));
    return g;
}

} // namespace

TableLabels default_table_labels() {
    TableLabels l;
    l.display = {{"density", "Density"},
                 {"log_population", "Population (log)"},
                 {"log_total_income", "Total Income (log)"},
                 {"unemployment", "Unemployment"},
                 {"poverty", "Poverty"},
                 {"pct_black", "Percentage Black"},
                 {"vote_gop", "Vote GOP"},
                 {"state_tax", "State Tax"}};
    return l;
}

void render_regression_table(std::span<const FeFit> models, std::ostream& out, const TableLabels& labels) {
    const Grid g = build_grid(models, labels);
    std::size_t first = 0;
    std::size_t width = 8;
    for (const auto& r : g.rows) {
        first = std::max(first, r[0].size());
        for (std::size_t c = 1; c < r.size(); ++c) width = std::max(width, r[c].size());
    }
    auto emit = [&](const std::vector<std::string>& r) {
        out << std::left << std::setw(static_cast<int>(first)) << r[0];
        for (std::size_t c = 1; c < r.size(); ++c) out << "  " << std::right << std::setw(static_cast<int>(width)) << r[c];
        out << '\n';
    };
    emit(g.header);
    out << std::string(first + (width + 2) * models.size(), '-') << '\n';
    for (std::size_t i = 0; i < g.rows.size(); ++i) {
        if (i + 2 == g.rows.size()) out << std::string(first + (width + 2) * models.size(), '-') << '\n';
        emit(g.rows[i]);
    }
    out << "State fixed effects included; standard errors clustered by state in parentheses.\n"
        << "*** p<0.01, ** p<0.05, * p<0.1\n";
}

void render_regression_csv(std::span<const FeFit> models, std::ostream& out, const TableLabels& labels) {
    const Grid g = build_grid(models, labels);
    auto emit = [&](const std::vector<std::string>& r) {
        for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << csv_escape(r[c]);
        out << '\n';
    };
    std::vector<std::string> header = g.header;
    header[0] = "term";
    emit(header);
    for (const auto& r : g.rows) emit(r);
}

} // namespace fuelgeo
