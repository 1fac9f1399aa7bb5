#include "fuelgeo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include <json.hpp>

#include "fuelgeo/error.hpp"
#include "fuelgeo/ingest/records.hpp"
#include "fuelgeo/rng.hpp"
#include "fuelgeo/text.hpp"

namespace fuelgeo::synth {

namespace {

using ingest::FuelType;
using ingest::PaymentMode;
using ingest::PriceObservation;
using ingest::Station;

constexpr double kKmPerDegree = 6371.0 * std::numbers::pi / 180.0;

Day start_day() { return Day{std::chrono::year{2017} / 1 / 10}; }

std::string two_digits(std::size_t v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02zu", v);
    return buf;
}

std::string county_code(std::size_t state, std::size_t county) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02zu%03zu", state, county);
    return buf;
}

std::string station_code(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "S%05zu", i);
    return buf;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

std::map<std::string, double> county_covariate_draw(std::mt19937_64& rng, double income_z) {
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    std::map<std::string, double> v;
    v["density"] = std::exp(3.5 + 1.2 * z(rng));
    v["log_population"] = 10.3 + 1.4 * z(rng);
    v["log_total_income"] = v["log_population"] + 10.5 + 0.2 * income_z;
    v["unemployment"] = std::clamp(0.05 + 0.015 * z(rng), 0.01, 0.2);
    v["poverty"] = std::clamp(0.15 + 0.05 * z(rng), 0.02, 0.5);
    v["pct_black"] = std::clamp(9.0 * u(rng) * u(rng) * 5.0, 0.0, 85.0);
    v["vote_gop"] = std::clamp(0.6 + 0.12 * z(rng), 0.1, 0.95);
    v["state_tax"] = 0.0; // overwritten per state
    v["income"] = 45000.0 + 8000.0 * income_z;
    v["population"] = std::exp(v["log_population"]);
    v["wage_per_job"] = 40000.0 + 6000.0 * z(rng) + 2000.0 * income_z;
    v["jobs_per_capita"] = std::clamp(0.45 + 0.08 * z(rng), 0.1, 1.0);
    v["jobs"] = v["population"] * v["jobs_per_capita"];
    return v;
}

} // namespace

std::vector<GeoPoint> random_points(std::uint64_t seed, std::size_t n, double lat0, double lat1, double lon0,
                                    double lon1) {
    auto rng = substream(seed, 0x70);
    std::uniform_real_distribution<double> lat(lat0, lat1);
    std::uniform_real_distribution<double> lon(lon0, lon1);
    std::vector<GeoPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = lat(rng);
        out.emplace_back(a, lon(rng));
    }
    return out;
}

SlopeGrid varying_slope_grid(std::uint64_t seed, std::size_t side, double noise_sd) {
    auto rng = substream(seed, 0x71);
    std::normal_distribution<double> z;
    const auto n = static_cast<Eigen::Index>(side * side);
    SlopeGrid g;
    g.data.covariate_names = {"income"};
    g.data.covariates.resize(n, 1);
    g.data.response.resize(n);
    g.true_slope.resize(n);
    for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t c = 0; c < side; ++c) {
            const auto i = static_cast<Eigen::Index>(r * side + c);
            const double lat = 32.0 + static_cast<double>(r);
            const double lon = -100.0 + static_cast<double>(c);
            g.data.ids.push_back("g" + std::to_string(i));
            g.data.points.emplace_back(lat, lon);
            const double x = z(rng);
            const double slope = 2.0 + lon / 10.0;
            g.data.covariates(i, 0) = x;
            g.true_slope(i) = slope;
            g.data.response(i) = slope * x + noise_sd * z(rng);
        }
    }
    return g;
}

GwrData known_subset_data(std::uint64_t seed, std::size_t n, double noise_sd) {
    auto rng = substream(seed, 0x72);
    std::normal_distribution<double> z;
    GwrData d;
    d.points = random_points(mix64(seed) ^ 0x72, n, 34.0, 42.0, -104.0, -92.0);
    d.covariate_names = kGwrCovariates;
    const auto m = static_cast<Eigen::Index>(n);
    d.covariates.resize(m, 5);
    d.response.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        d.ids.push_back("c" + std::to_string(i));
        for (Eigen::Index j = 0; j < 5; ++j) d.covariates(i, j) = z(rng);
        const auto& p = d.points[static_cast<std::size_t>(i)];
        const double b_income = 1.0 + 0.3 * std::sin(p.lon() / 2.0);
        const double b_wage = 0.8 + 0.3 * std::cos(p.lat() / 2.0);
        d.response(i) = 3.0 + b_income * d.covariates(i, 0) + b_wage * d.covariates(i, 2) + noise_sd * z(rng);
    }
    return d;
}

GwrData random_gwr_instance(std::uint64_t seed, std::size_t n, std::size_t covariates) {
    if (covariates == 0 || covariates > kGwrCovariates.size()) {
        throw Error(ErrorKind::InvalidArgument, "random_gwr_instance: bad covariate count");
    }
    auto rng = substream(seed, 0x73);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    GwrData d;
    d.points = random_points(mix64(seed) ^ 0x73, n, 35.0, 41.0, -100.0, -92.0);
    d.covariate_names.assign(kGwrCovariates.begin(),
                             kGwrCovariates.begin() + static_cast<std::ptrdiff_t>(covariates));
    const auto m = static_cast<Eigen::Index>(n);
    const auto q = static_cast<Eigen::Index>(covariates);
    d.covariates.resize(m, q);
    d.response.resize(m);
    const double phase_a = u(rng), phase_b = u(rng);
    const double amplitude = 0.2 + 0.6 * std::abs(z(rng));
    const double noise_sd = 0.2 + 0.3 * std::abs(z(rng));
    for (Eigen::Index i = 0; i < m; ++i) {
        d.ids.push_back("r" + std::to_string(i));
        const auto& p = d.points[static_cast<std::size_t>(i)];
        double y = 1.0 + amplitude * std::sin(p.lat() / 1.5 + phase_a);
        for (Eigen::Index j = 0; j < q; ++j) {
            const double x = z(rng);
            d.covariates(i, j) = x;
            y += (0.7 + amplitude * std::cos(p.lon() / 2.0 + phase_b + static_cast<double>(j))) * x;
        }
        d.response(i) = y + noise_sd * z(rng);
    }
    return d;
}

GwrData stationary_linear_data(std::uint64_t seed, std::size_t n, double noise_sd) {
    auto rng = substream(seed, 0x74);
    std::normal_distribution<double> z;
    GwrData d;
    d.points = random_points(mix64(seed) ^ 0x74, n, 35.0, 41.0, -100.0, -92.0);
    d.covariate_names = {"income"};
    const auto m = static_cast<Eigen::Index>(n);
    d.covariates.resize(m, 1);
    d.response.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        d.ids.push_back("s" + std::to_string(i));
        d.covariates(i, 0) = z(rng);
        d.response(i) = 1.0 + 0.5 * d.covariates(i, 0) + noise_sd * z(rng);
    }
    return d;
}

std::vector<PanelObservation> fe_panel(std::uint64_t seed, std::size_t states, std::size_t counties_per_state,
                                       std::size_t stations_per_county, std::size_t days) {
    auto rng = substream(seed, 0x75);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    std::vector<double> day_effect(days);
    for (auto& e : day_effect) e = 0.02 * z(rng);
    std::vector<PanelObservation> out;
    std::size_t station = 0;
    for (std::size_t s = 1; s <= states; ++s) {
        const double se = 0.15 * z(rng);
        for (std::size_t c = 1; c <= counties_per_state; ++c) {
            const double ce = 0.05 * z(rng);
            for (std::size_t k = 0; k < stations_per_county; ++k) {
                const double ke = 0.03 * z(rng);
                const std::string id = station_code(station++);
                for (std::size_t t = 0; t < days; ++t) {
                    if (u(rng) < 0.1) continue; // unbalanced panel
                    const double price = 2.25 + se + ce + ke + day_effect[t] + 0.02 * z(rng);
                    out.push_back({id, two_digits(s), county_code(s, c),
                                   start_day() + std::chrono::days{static_cast<int>(t)}, price});
                }
            }
        }
    }
    return out;
}

StateEffectRows state_effect_rows(std::uint64_t seed, std::size_t states, std::size_t counties_per_state,
                                  double state_sd, double noise_sd) {
    auto rng = substream(seed, 0x76);
    std::normal_distribution<double> z;
    StateEffectRows out;
    for (std::size_t s = 1; s <= states; ++s) {
        const double se = state_sd * z(rng);
        const double tax = 0.2 + 0.1 * std::abs(z(rng));
        for (std::size_t c = 1; c <= counties_per_state; ++c) {
            CountyModelRow row;
            row.county_fips = county_code(s, c);
            row.state_id = two_digits(s);
            row.log_mean_price = std::log(2.28) + se + noise_sd * z(rng);
            for (const auto& [name, v] : county_covariate_draw(rng, z(rng))) {
                if (std::find(CountyCovariates::names().begin(), CountyCovariates::names().end(), name) !=
                    CountyCovariates::names().end()) {
                    row.covariates.set(name, name == "state_tax" ? tax : v);
                }
            }
            out.rows.push_back(std::move(row));
        }
    }
    // Realized between-state share of the response variance.
    std::map<std::string, std::pair<double, std::size_t>> groups;
    double total = 0.0;
    for (const auto& r : out.rows) {
        auto& g = groups[r.state_id];
        g.first += r.log_mean_price;
        g.second += 1;
        total += r.log_mean_price;
    }
    const double grand = total / static_cast<double>(out.rows.size());
    double tss = 0.0, between = 0.0;
    for (const auto& r : out.rows) tss += (r.log_mean_price - grand) * (r.log_mean_price - grand);
    for (const auto& [id, g] : groups) {
        const double m = g.first / static_cast<double>(g.second);
        between += static_cast<double>(g.second) * (m - grand) * (m - grand);
    }
    out.state_share = between / tss;
    return out;
}

CorrelatedField correlated_field(std::uint64_t seed, std::size_t n, double length_km, std::size_t days,
                                 double box_km) {
    const double lat_center = 40.0;
    const double dlat = box_km / kKmPerDegree;
    const double dlon = box_km / (kKmPerDegree * std::cos(lat_center * std::numbers::pi / 180.0));
    CorrelatedField f;
    f.locations = random_points(mix64(seed) ^ 0x77, n, lat_center - dlat / 2, lat_center + dlat / 2,
                                -95.0 - dlon / 2, -95.0 + dlon / 2);
    const Eigen::MatrixXd d = distance_matrix(f.locations);
    Eigen::MatrixXd cov = (-d.array() / length_km).exp().matrix();
    cov.diagonal().array() += 1e-9;
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularFit, "field covariance not positive definite");

    auto rng = substream(seed, 0x77);
    std::normal_distribution<double> z;
    Eigen::VectorXd white(static_cast<Eigen::Index>(n));
    for (auto& v : white) v = z(rng);
    const Eigen::VectorXd field = llt.matrixL() * white;
    for (std::size_t t = 0; t < days; ++t) {
        const Day day = start_day() + std::chrono::days{static_cast<int>(t)};
        for (std::size_t i = 0; i < n; ++i) {
            f.panel.push_back({i, day, 2.28 + 0.1 * field(static_cast<Eigen::Index>(i)) + 0.01 * z(rng)});
        }
    }
    return f;
}

void MockCorpus::install(ingest::MockSource& source) const {
    for (const auto& [url, body] : pages) source.add_page(url, body);
    for (const auto& url : failing_urls) source.fail_always(url);
    for (const auto& [url, count] : flaky_urls) source.fail_first(url, count);
}

MockCorpus mock_corpus(std::uint64_t seed, std::size_t pages, std::size_t retries) {
    auto rng = substream(seed, 0x78);
    std::uniform_real_distribution<double> u;
    std::normal_distribution<double> z;
    MockCorpus corpus;

    for (std::size_t i = 0; i < 40; ++i) {
        const std::size_t state = 1 + i % 4;
        const std::size_t county = 1 + (i / 4) % 5;
        Station s;
        s.station_id = station_code(i);
        s.point = GeoPoint(36.0 + static_cast<double>(state) + 0.1 * u(rng), -98.0 + static_cast<double>(county) * 0.5);
        s.city = "City" + std::to_string(county);
        s.county_fips = county_code(state, county);
        s.state_id = two_digits(state);
        corpus.stations.push_back(s);
    }

    const std::vector<std::string> hosts = {"prices-a.test", "prices-b.test", "prices-c.test"};
    std::set<std::string> keys;
    std::vector<std::string> stored_lines; // candidates for duplication
    std::set<std::size_t> failing, flaky;
    if (pages >= 10) {
        failing = {pages / 3, (2 * pages) / 3};
        flaky = {1, pages / 2 + 1, pages - 2};
    }

    CorpusTruth& t = corpus.truth;
    t.pages = pages;
    for (std::size_t p = 0; p < pages; ++p) {
        const std::string url = "http://" + hosts[p % hosts.size()] + "/stations/page" + std::to_string(p);
        corpus.urls.push_back(url);
        const bool fails = failing.count(p) > 0;
        std::string body = "# synthetic price page " + std::to_string(p) + "\n";
        const std::size_t n_records = 20 + static_cast<std::size_t>(u(rng) * 20.0);
        for (std::size_t r = 0; r < n_records; ++r) {
            PriceObservation o;
            std::string key;
            do {
                o.station_id = corpus.stations[static_cast<std::size_t>(u(rng) * 40.0) % 40].station_id;
                o.timestamp = ingest::Timestamp{start_day()} +
                              std::chrono::seconds{static_cast<long>(u(rng) * 7.0 * 86400.0)};
                const double f = u(rng);
                o.fuel_type = f < 0.5 ? FuelType::Regular
                                      : f < 0.7 ? FuelType::Diesel : f < 0.85 ? FuelType::Midgrade : FuelType::Premium;
                o.payment_mode = u(rng) < 0.9 ? PaymentMode::Credit : PaymentMode::Cash;
                o.price = round_to(2.3 + 0.2 * z(rng), 0.001);
                key = ingest::dedup_key(o);
            } while (keys.count(key) > 0);
            keys.insert(key);
            const std::string line = ingest::format_record(o);
            body += line + "\n";
            if (!fails) {
                t.parsed += 1;
                t.unique += 1;
                if (o.payment_mode == PaymentMode::Credit && o.fuel_type == FuelType::Regular) t.credit_regular += 1;
                stored_lines.push_back(line);
            }
        }
        if (p % 10 == 5 && !stored_lines.empty()) {
            // Repeat a record already served by an earlier page.
            body += stored_lines[static_cast<std::size_t>(u(rng) * static_cast<double>(stored_lines.size())) %
                                 stored_lines.size()] +
                    "\n";
            if (!fails) {
                t.parsed += 1;
                t.duplicates += 1;
            }
        }
        if (p % 12 == 7) {
            const std::string sid = corpus.stations[p % 40].station_id;
            body += sid + "|2017-01-11T09:00:00Z|Regular|Credit|0.05\n";
            body += sid + "|2017-01-11T09:05:00Z|Kerosene|Credit|2.40\n";
            body += "\n";
            if (!fails) t.quarantined += 2;
        }
        corpus.pages[url] = std::move(body);
        if (fails) {
            corpus.failing_urls.push_back(url);
            t.failing_pages += 1;
            t.expected_attempts += retries + 1;
        } else if (flaky.count(p) && retries > 0) {
            corpus.flaky_urls[url] = 1;
            t.flaky_pages += 1;
            t.expected_attempts += 2;
        } else {
            t.expected_attempts += 1;
        }
    }
    return corpus;
}

FixtureTruth write_cli_fixture(std::uint64_t seed, const std::filesystem::path& dir_in, std::size_t states,
                               std::size_t counties_per_state, std::size_t days, std::size_t pages) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::absolute(dir_in);
    fs::create_directories(dir / "pages");
    auto rng = substream(seed, 0x79);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;

    FixtureTruth truth;
    std::vector<Station> stations;
    std::vector<std::string> cov_lines;
    std::vector<std::string> records;
    std::set<std::string> keys;
    // Generated Credit/Regular prices per county and station-day.
    std::map<std::string, std::map<std::pair<std::string, int>, std::vector<double>>> county_cells;
    std::map<std::string, std::string> county_state;

    std::vector<double> day_factor(days);
    for (auto& f : day_factor) f = 1.0 + 0.01 * z(rng);

    const auto& cov_names = CountyCovariates::names();
    std::vector<std::string> all_cov(cov_names.begin(), cov_names.end());
    for (const auto& g : kGwrCovariates) all_cov.push_back(g);

    auto emit = [&](const PriceObservation& o) {
        const std::string key = ingest::dedup_key(o);
        if (!keys.insert(key).second) return false;
        records.push_back(ingest::format_record(o));
        truth.records += 1;
        return true;
    };

    const std::size_t cols = 5;
    std::size_t station_index = 0;
    for (std::size_t s = 1; s <= states; ++s) {
        const double se = 0.06 * z(rng);
        const double tax = round_to(0.15 + 0.15 * u(rng), 0.001);
        const double lat0 = 30.0 + 3.0 * static_cast<double>((s - 1) / cols);
        const double lon0 = -110.0 + 3.0 * static_cast<double>((s - 1) % cols);
        for (std::size_t c = 1; c <= counties_per_state; ++c) {
            const std::string fips = county_code(s, c);
            county_state[fips] = two_digits(s);
            const double lat = lat0 + 3.0 * u(rng);
            const double lon = lon0 + 3.0 * u(rng);
            const double income_z = z(rng);
            auto cov = county_covariate_draw(rng, income_z);
            cov["state_tax"] = tax;
            const double ce = 0.02 * income_z + 0.03 * z(rng);
            const bool incomplete = (s * 31 + c) % 97 == 0;

            std::string line = fips + "," + two_digits(s) + "," + format_number(round_to(lat, 1e-4)) + "," +
                               format_number(round_to(lon, 1e-4));
            for (const auto& name : all_cov) {
                line += ",";
                if (incomplete && name == "vote_gop") continue;
                line += format_number(round_to(cov.at(name), 1e-6));
            }
            cov_lines.push_back(line);
            truth.counties += 1;

            const std::size_t n_stations = 1 + static_cast<std::size_t>(u(rng) * 3.0) % 3;
            for (std::size_t k = 0; k < n_stations; ++k) {
                Station st;
                st.station_id = station_code(station_index++);
                st.point = GeoPoint(round_to(lat + 0.05 * z(rng), 1e-4), round_to(lon + 0.05 * z(rng), 1e-4));
                st.city = "Town" + std::to_string(c);
                st.county_fips = fips;
                st.state_id = two_digits(s);
                stations.push_back(st);
                truth.stations += 1;
                const double level = 2.28 * std::exp(se + ce + 0.01 * z(rng));

                for (std::size_t t = 0; t < days; ++t) {
                    if (u(rng) < 0.15) continue;
                    const ingest::Timestamp day0{start_day() + std::chrono::days{static_cast<int>(t)}};
                    const std::size_t reports = 1 + static_cast<std::size_t>(u(rng) * 2.0) % 2;
                    for (std::size_t r = 0; r < reports; ++r) {
                        PriceObservation o{st.station_id,
                                           day0 + std::chrono::seconds{static_cast<long>(6 * 3600 + r * 4 * 3600 +
                                                                                         u(rng) * 3000.0)},
                                           FuelType::Regular, PaymentMode::Credit,
                                           round_to(level * day_factor[t] * (1.0 + 0.004 * z(rng)), 0.001), ""};
                        if (emit(o)) {
                            truth.credit_regular += 1;
                            if (!incomplete) county_cells[fips][{st.station_id, static_cast<int>(t)}].push_back(o.price);
                        }
                        if (u(rng) < 0.3) {
                            PriceObservation diesel = o;
                            diesel.fuel_type = FuelType::Diesel;
                            diesel.price = round_to(o.price * 1.12, 0.001);
                            emit(diesel);
                        }
                        if (u(rng) < 0.06) {
                            PriceObservation cash = o;
                            cash.payment_mode = PaymentMode::Cash;
                            cash.price = round_to(o.price - 0.1, 0.001);
                            emit(cash);
                        }
                    }
                }
            }
        }
    }

    // Distribute records over pages with a fixed shuffle; append a few
    // repeats and implausible entries that ingestion must drop.
    std::shuffle(records.begin(), records.end(), rng);
    std::vector<std::string> bodies(pages);
    for (std::size_t i = 0; i < records.size(); ++i) bodies[i % pages] += records[i] + "\n";
    for (std::size_t p = 0; p < pages; p += 9) {
        if (!records.empty()) bodies[(p + 1) % pages] += records[(p * 7919) % records.size()] + "\n";
        bodies[p] += stations[p % stations.size()].station_id + "|2017-01-12T10:00:00Z|Regular|Credit|25.9\n";
    }

    std::ofstream urls(dir / "urls.txt");
    for (std::size_t p = 0; p < pages; ++p) {
        char name[32];
        std::snprintf(name, sizeof name, "page_%03zu.txt", p);
        const fs::path path = dir / "pages" / name;
        std::ofstream(path, std::ios::binary) << bodies[p];
        urls << "file://" << path.string() << "\n";
    }

    {
        std::ofstream out(dir / "stations.csv");
        ingest::write_station_registry(ingest::StationRegistry(stations), out);
    }
    {
        std::ofstream out(dir / "covariates.csv");
        out << "county_fips,state_id,lat,lon";
        for (const auto& name : all_cov) out << "," << name;
        out << "\n";
        for (const auto& l : cov_lines) out << l << "\n";
    }

    // Between-state share of county log mean price over complete counties,
    // following the station-day then county averaging of the pipeline.
    std::vector<std::pair<std::string, double>> y;
    for (auto& [fips, cells] : county_cells) {
        std::vector<double> station_days;
        for (auto& [key, prices] : cells) {
            std::sort(prices.begin(), prices.end());
            double sum = 0.0;
            for (double v : prices) sum += v;
            station_days.push_back(sum / static_cast<double>(prices.size()));
        }
        double sum = 0.0;
        for (double v : station_days) sum += v;
        y.emplace_back(county_state[fips], std::log(sum / static_cast<double>(station_days.size())));
    }
    double grand = 0.0;
    std::map<std::string, std::pair<double, std::size_t>> groups;
    for (const auto& [state, v] : y) {
        grand += v;
        groups[state].first += v;
        groups[state].second += 1;
    }
    grand /= static_cast<double>(y.size());
    double tss = 0.0, between = 0.0;
    for (const auto& [state, v] : y) tss += (v - grand) * (v - grand);
    for (const auto& [state, g] : groups) {
        const double m = g.first / static_cast<double>(g.second);
        between += static_cast<double>(g.second) * (m - grand) * (m - grand);
    }
    truth.state_share = between / tss;

    std::ofstream(dir / "fuelgeo.conf")
        << "# synthetic fixture run\n"
           "stations = stations.csv\n"
           "covariates = covariates.csv\n"
           "urls = urls.txt\n"
           "max_in_flight = 4\n"
           "retries = 1\n"
           "fuel = regular\n"
           "window = weekly\n"
           "d0_grid = 10,30,100,300,1000\n"
           "gwr_covariates = income,wage_per_job\n"
           "kernel = gaussian\n"
           "criterion = aicc\n"
           "bandwidth_mode = adaptive\n"
           "fe_level = state\n"
           "seed = "
        << seed << "\n";

    std::ofstream(dir / "moran_pair.csv") << "location,lat,lon,day,value\n"
                                             "A,40,-100,2017-01-10,1\n"
                                             "B,40,-99.9,2017-01-10,-1\n";
    std::ofstream(dir / "moran_pair.conf") << "panel = moran_pair.csv\n"
                                              "d0_grid = 10\n"
                                              "window = daily\n"
                                              "min_locations = 2\n";

    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["counties"] = truth.counties;
    j["stations"] = truth.stations;
    j["records"] = truth.records;
    j["credit_regular"] = truth.credit_regular;
    j["state_share"] = truth.state_share;
    std::ofstream(dir / "truth.json") << j.dump(2) << "\n";
    return truth;
}

} // namespace fuelgeo::synth
