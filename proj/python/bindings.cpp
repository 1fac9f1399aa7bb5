#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fuelgeo/cli.hpp"
#include "fuelgeo/error.hpp"
#include "fuelgeo/gwr.hpp"
#include "fuelgeo/ingest/records.hpp"
#include "fuelgeo/spatial_stats.hpp"

namespace py = pybind11;
using namespace fuelgeo;

namespace {

std::vector<GeoPoint> points_of(const std::vector<double>& lat, const std::vector<double>& lon) {
    if (lat.size() != lon.size()) throw Error(ErrorKind::InvalidArgument, "lat and lon lengths differ");
    std::vector<GeoPoint> p;
    p.reserve(lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) p.emplace_back(lat[i], lon[i]);
    return p;
}

Bandwidth bandwidth_of(const std::string& mode, double value) {
    if (mode == "adaptive") {
        if (value < 1 || value != std::floor(value)) throw Error(ErrorKind::InvalidBandwidth, "k must be a positive integer");
        return Bandwidth::adaptive(static_cast<std::size_t>(value));
    }
    if (mode == "fixed") return Bandwidth::fixed(value);
    throw Error(ErrorKind::InvalidArgument, "bandwidth mode must be 'adaptive' or 'fixed'");
}

GwrData data_of(const std::vector<double>& lat, const std::vector<double>& lon, const Eigen::MatrixXd& x,
                const Eigen::VectorXd& y, const std::vector<std::string>& names) {
    GwrData d;
    d.points = points_of(lat, lon);
    d.covariate_names = names;
    d.covariates = x;
    d.response = y;
    for (std::size_t i = 0; i < d.points.size(); ++i) d.ids.push_back(std::to_string(i));
    d.validate();
    return d;
}

py::dict fit_dict(const GwrFit& fit) {
    py::dict out;
    out["coefficient_names"] = fit.coefficient_names;
    out["local_coefficients"] = fit.local_coefficients;
    out["normalized_coefficients"] = fit.normalized_coefficients;
    out["local_r2"] = fit.local_r2;
    out["fitted"] = fit.fitted;
    out["residuals"] = fit.residuals;
    out["hat_trace"] = fit.hat_trace;
    out["global_r2"] = fit.global_r2;
    out["rss"] = fit.rss;
    out["aicc"] = fit.aicc;
    out["cv_score"] = fit.cv_score;
    return out;
}

} // namespace

PYBIND11_MODULE(_fuelgeo, m) {
    m.doc() = "Spatial statistics, GWR and fixed-effect models for fuel prices";

    static py::exception<Error> error_type(m, "FuelgeoError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = error_type;
            err.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetString(error_type.ptr(), e.what());
        }
    });

    m.def("haversine_km", [](double lat1, double lon1, double lat2, double lon2) {
        return haversine_distance(GeoPoint(lat1, lon1), GeoPoint(lat2, lon2));
    }, py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));

    m.def("moran_index", [](const std::vector<double>& values, const std::vector<double>& lat,
                            const std::vector<double>& lon, const std::string& kernel, double d0,
                            bool row_standardize) {
        auto w = build_weights(points_of(lat, lon), parse_kernel(kernel), Bandwidth::fixed(d0));
        if (row_standardize) w = w.row_standardized();
        return moran_index(values, w).index;
    }, py::arg("values"), py::arg("lat"), py::arg("lon"), py::arg("kernel") = "exponential", py::arg("d0") = 100.0,
       py::arg("row_standardize") = false);

    m.def("spearman_rank", [](const std::vector<double>& x, const std::vector<double>& y) {
        return spearman_rank(x, y);
    });

    m.def("variance_decomposition", [](const std::vector<double>& values, const std::vector<std::string>& groups) {
        const auto v = variance_decomposition(values, std::span<const std::string>(groups));
        py::dict d;
        d["total"] = v.total;
        d["between"] = v.between;
        d["within"] = v.within;
        d["n_groups"] = v.n_groups;
        return d;
    });

    m.def("pca_variance_explained", [](const Eigen::MatrixXd& data, bool normalize) {
        return pca_variance_explained(data, normalize);
    }, py::arg("data"), py::arg("normalize") = true);

    m.def("gwr_fit", [](const std::vector<double>& lat, const std::vector<double>& lon, const Eigen::MatrixXd& x,
                        const Eigen::VectorXd& y, const std::vector<std::string>& names, const std::string& kernel,
                        const std::string& mode, double bandwidth) {
        const auto d = data_of(lat, lon, x, y, names);
        GwrSpec s;
        s.covariates = names;
        s.kernel = parse_kernel(kernel);
        s.bandwidth = bandwidth_of(mode, bandwidth);
        return fit_dict(gwr_fit(d, s));
    }, py::arg("lat"), py::arg("lon"), py::arg("x"), py::arg("y"), py::arg("names"), py::arg("kernel") = "gaussian",
       py::arg("mode") = "adaptive", py::arg("bandwidth") = 20);

    m.def("optimize_bandwidth", [](const std::vector<double>& lat, const std::vector<double>& lon,
                                   const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   const std::vector<std::string>& names, const std::string& kernel,
                                   const std::string& criterion, const std::string& mode, bool exhaustive) {
        const auto d = data_of(lat, lon, x, y, names);
        BandwidthSearchOptions o;
        o.exhaustive = exhaustive;
        const auto c = optimize_bandwidth(d, names, parse_kernel(kernel), parse_criterion(criterion),
                                          mode == "fixed" ? BandwidthMode::FixedDistance : BandwidthMode::AdaptiveKnn, o);
        py::dict out;
        out["bandwidth"] = c.bandwidth.value();
        out["score"] = c.score;
        out["trace"] = c.trace;
        return out;
    }, py::arg("lat"), py::arg("lon"), py::arg("x"), py::arg("y"), py::arg("names"), py::arg("kernel") = "gaussian",
       py::arg("criterion") = "aicc", py::arg("mode") = "adaptive", py::arg("exhaustive") = false);

    m.def("parse_price_records", [](const std::string& text, const std::string& url) {
        const auto doc = ingest::parse_price_record(text, url);
        py::list rows;
        for (const auto& o : doc.observations) {
            py::dict r;
            r["station_id"] = o.station_id;
            r["timestamp"] = ingest::format_timestamp(o.timestamp);
            r["fuel_type"] = std::string(ingest::to_string(o.fuel_type));
            r["payment_mode"] = std::string(ingest::to_string(o.payment_mode));
            r["price"] = o.price;
            rows.append(r);
        }
        py::list quarantined;
        for (const auto& q : doc.quarantined) quarantined.append(py::make_tuple(q.line, q.reason));
        return py::make_tuple(rows, quarantined);
    }, py::arg("text"), py::arg("url") = "");

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::vector<std::string> argv = {"fuelgeo"};
        argv.insert(argv.end(), args.begin(), args.end());
        py::gil_scoped_release release;
        return cli::execute(argv);
    });
}
