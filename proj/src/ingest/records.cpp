#include "fuelgeo/ingest/records.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "fuelgeo/error.hpp"
#include "fuelgeo/text.hpp"

namespace fuelgeo::ingest {

namespace {

bool iequals(std::string_view a, std::string_view b) noexcept {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

bool read_int(std::string_view s, int& out) noexcept {
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

} // namespace

std::string_view to_string(FuelType f) noexcept {
    switch (f) {
    case FuelType::Diesel: return "Diesel";
    case FuelType::Regular: return "Regular";
    case FuelType::Midgrade: return "Midgrade";
    case FuelType::Premium: return "Premium";
    }
    return "Unknown";
}

std::string_view to_string(PaymentMode m) noexcept {
    switch (m) {
    case PaymentMode::Credit: return "Credit";
    case PaymentMode::Cash: return "Cash";
    case PaymentMode::Other: return "Other";
    }
    return "Unknown";
}

std::optional<FuelType> parse_fuel_type(std::string_view s) noexcept {
    for (auto f : {FuelType::Diesel, FuelType::Regular, FuelType::Midgrade, FuelType::Premium}) {
        if (iequals(s, to_string(f))) return f;
    }
    return std::nullopt;
}

std::optional<PaymentMode> parse_payment_mode(std::string_view s) noexcept {
    for (auto m : {PaymentMode::Credit, PaymentMode::Cash, PaymentMode::Other}) {
        if (iequals(s, to_string(m))) return m;
    }
    return std::nullopt;
}

std::optional<Day> parse_date(std::string_view s) noexcept {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!read_int(s.substr(0, 4), y) || !read_int(s.substr(5, 2), m) || !read_int(s.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Day{ymd};
}

std::string format_date(Day d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) noexcept {
    if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) s.remove_suffix(1);
    if (s.size() != 19 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':' || s[16] != ':') return std::nullopt;
    const auto day = parse_date(s.substr(0, 10));
    int hh = 0, mm = 0, ss = 0;
    if (!day || !read_int(s.substr(11, 2), hh) || !read_int(s.substr(14, 2), mm) ||
        !read_int(s.substr(17, 2), ss)) {
        return std::nullopt;
    }
    if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 60) return std::nullopt;
    return Timestamp{*day} + std::chrono::hours{hh} + std::chrono::minutes{mm} + std::chrono::seconds{ss};
}

std::string format_timestamp(Timestamp t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(day).c_str(),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

std::string dedup_key(const PriceObservation& o) {
    std::string key = o.station_id;
    key += '|';
    key += format_timestamp(o.timestamp);
    key += '|';
    key += to_string(o.fuel_type);
    key += '|';
    key += to_string(o.payment_mode);
    return key;
}

std::string format_record(const PriceObservation& o) {
    return dedup_key(o) + '|' + format_number(o.price);
}

ParsedDocument parse_price_record(std::string_view raw, const std::string& source_url,
                                  const ParserConfig& config) {
    ParsedDocument out;
    std::size_t line_no = 0;
    for (std::string_view line : split_lines(raw)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;

        auto fail = [&](const std::string& why) {
            throw Error(ErrorKind::Parse, source_url + ":" + std::to_string(line_no) + ": " + why);
        };
        const auto fields = split(body, config.delimiter);
        if (fields.size() != 5) fail("expected 5 fields, found " + std::to_string(fields.size()));
        const auto ts = parse_timestamp(trim(fields[1]));
        if (!ts) fail("malformed timestamp '" + std::string(fields[1]) + "'");
        const auto price = parse_double(trim(fields[4]));
        if (!price) fail("malformed price '" + std::string(fields[4]) + "'");
        const std::string station(trim(fields[0]));
        if (station.empty()) fail("empty station id");

        auto quarantine = [&](std::string reason) {
            out.quarantined.push_back({line_no, std::string(body), std::move(reason)});
        };
        const auto fuel = parse_fuel_type(trim(fields[2]));
        if (!fuel) {
            quarantine("unknown fuel type");
            continue;
        }
        const auto mode = parse_payment_mode(trim(fields[3]));
        if (!mode) {
            quarantine("unknown payment mode");
            continue;
        }
        if (!(*price > config.min_price)) {
            quarantine("below plausibility band");
            continue;
        }
        if (!(*price < config.max_price)) {
            quarantine("above plausibility band");
            continue;
        }
        out.observations.push_back({station, *ts, *fuel, *mode, *price, source_url});
    }
    return out;
}

void Station::validate() const {
    if (station_id.empty()) throw Error(ErrorKind::InvalidArgument, "station without id");
    const bool digits = county_fips.size() == 5 &&
                        std::all_of(county_fips.begin(), county_fips.end(),
                                    [](unsigned char c) { return std::isdigit(c) != 0; });
    if (!digits) {
        throw Error(ErrorKind::InvalidArgument, "station " + station_id + ": county_fips must be 5 digits");
    }
    if (county_fips.compare(0, 2, state_id) != 0 || state_id.size() != 2) {
        throw Error(ErrorKind::InvalidArgument,
                    "station " + station_id + ": county " + county_fips + " is not in state " + state_id);
    }
}

} // namespace fuelgeo::ingest
