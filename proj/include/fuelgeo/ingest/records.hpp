#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fuelgeo/geo.hpp"

namespace fuelgeo::ingest {

using Timestamp = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

enum class FuelType { Diesel, Regular, Midgrade, Premium };
enum class PaymentMode { Credit, Cash, Other };

std::string_view to_string(FuelType f) noexcept;
std::string_view to_string(PaymentMode m) noexcept;
std::optional<FuelType> parse_fuel_type(std::string_view s) noexcept;
std::optional<PaymentMode> parse_payment_mode(std::string_view s) noexcept;

/// "YYYY-MM-DDTHH:MM:SSZ"
std::optional<Timestamp> parse_timestamp(std::string_view s) noexcept;
std::string format_timestamp(Timestamp t);
/// "YYYY-MM-DD"
std::optional<Day> parse_date(std::string_view s) noexcept;
std::string format_date(Day d);

struct PriceObservation {
    std::string station_id;
    Timestamp timestamp;
    FuelType fuel_type = FuelType::Regular;
    PaymentMode payment_mode = PaymentMode::Credit;
    double price = 0.0;
    std::string source_url;

    Day day() const { return std::chrono::floor<std::chrono::days>(timestamp); }
};

/// Deduplication key: station, timestamp, fuel type, payment mode.
std::string dedup_key(const PriceObservation& o);

/// `station_id|timestamp|fuel_type|payment_mode|price`, no trailing newline.
std::string format_record(const PriceObservation& o);

struct ParserConfig {
    char delimiter = '|';
    double min_price = 0.5; // exclusive
    double max_price = 10.0; // exclusive
};

struct QuarantinedEntry {
    std::size_t line = 0;
    std::string text;
    std::string reason;
};

struct ParsedDocument {
    std::vector<PriceObservation> observations;
    std::vector<QuarantinedEntry> quarantined;
};

/// Parses a line-delimited price document. Entries outside the plausibility
/// band or with an unknown fuel type are quarantined. Throws Error(Parse)
/// naming `source_url` when a line is structurally malformed.
ParsedDocument parse_price_record(std::string_view raw, const std::string& source_url,
                                  const ParserConfig& config = {});

struct Station {
    std::string station_id;
    GeoPoint point{0.0, 0.0};
    std::string city;
    std::string county_fips;
    std::string state_id;

    void validate() const;
};

} // namespace fuelgeo::ingest
