#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fuelgeo {

struct OlsResult {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd bread; // (X'X)^{-1}
    double r_squared = 0.0;
    double rss = 0.0;
};

/// Least squares via column-pivoted QR. Rank deficiency throws
/// SingularDesign naming the collinear columns.
OlsResult ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
              std::span<const std::string> column_names = {});

struct PanelObservation {
    std::string station_id;
    std::string state_id;
    std::string county_fips;
    std::chrono::sys_days day;
    double price = 0.0;
};

enum class FeLevel { State, County, Station };

std::string_view to_string(FeLevel level) noexcept;
FeLevel parse_fe_level(std::string_view name);

struct FixedEffectSpec {
    FeLevel level = FeLevel::State;
    bool include_day_effect = false;
};

struct FeVarianceExplained {
    double r_squared = 0.0;
    std::size_t n_groups = 0;
    std::size_t n_observations = 0;
    std::size_t iterations = 0; // alternating-projection sweeps with a day effect
};

/// R^2 of price on group dummies (and day dummies), by demeaning.
FeVarianceExplained fe_variance_explained(std::span<const PanelObservation> panel,
                                          const FixedEffectSpec& spec);

/// County-level covariates. Rates are fractions in [0, 1]; pct_black is a
/// percentage.
struct CountyCovariates {
    std::optional<double> density;
    std::optional<double> log_population;
    std::optional<double> log_total_income;
    std::optional<double> unemployment;
    std::optional<double> poverty;
    std::optional<double> pct_black;
    std::optional<double> vote_gop;
    std::optional<double> state_tax;

    static const std::vector<std::string>& names();
    std::optional<double> get(std::string_view name) const;
    void set(std::string_view name, double value);
    void validate() const;
};

struct CountyModelRow {
    std::string county_fips;
    std::string state_id;
    double log_mean_price = 0.0;
    CountyCovariates covariates;
};

struct ClusterRobust {
    Eigen::VectorXd standard_errors;
    Eigen::MatrixXd covariance;
    std::size_t n_clusters = 0;
    double correction = 0.0;
};

/// Liang-Zeger sandwich with small-sample factor G/(G-1) * (n-1)/(n-k).
/// `dof_parameters` overrides k (defaults to the design's column count).
ClusterRobust cluster_robust_se(const Eigen::MatrixXd& design, const Eigen::VectorXd& residuals,
                                const Eigen::MatrixXd& bread, std::span<const std::string> clusters,
                                std::optional<std::size_t> dof_parameters = std::nullopt);

struct FeFit {
    std::vector<std::string> names;
    std::map<std::string, double> coefficients;
    std::map<std::string, double> standard_errors;
    std::map<std::string, double> state_effects;
    double r_squared = 0.0;
    std::size_t n_observations = 0;
    std::size_t n_clusters = 0;
    std::string fe_level = "state";

    double t_stat(const std::string& name) const;
    double p_value(const std::string& name) const;
};

/// Log county price on covariates with state fixed effects absorbed and
/// state-clustered standard errors. An empty covariate set gives the
/// fixed-effect-only model.
FeFit county_regression(std::span<const CountyModelRow> rows,
                        std::span<const std::string> covariate_set);

/// Two-sided p-value: normal reference, Student t with G-1 degrees of
/// freedom when there are at most 30 clusters.
double coefficient_p_value(double t, std::size_t n_clusters);
std::string significance_stars(double p_value);

struct TableLabels {
    std::map<std::string, std::string> display; // covariate name -> row label
};

/// Side-by-side regression table: coefficient with stars, standard error
/// in parentheses, then R-squared and N.
void render_regression_table(std::span<const FeFit> models, std::ostream& out,
                             const TableLabels& labels = {});
void render_regression_csv(std::span<const FeFit> models, std::ostream& out,
                           const TableLabels& labels = {});
TableLabels default_table_labels();

} // namespace fuelgeo
