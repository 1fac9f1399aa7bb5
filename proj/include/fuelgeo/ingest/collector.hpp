#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "fuelgeo/error.hpp"
#include "fuelgeo/ingest/proxy_pool.hpp"
#include "fuelgeo/ingest/records.hpp"
#include "fuelgeo/ingest/source.hpp"
#include "fuelgeo/ingest/store.hpp"

namespace fuelgeo::ingest {

struct CollectionPlan {
    std::vector<std::string> urls;
    std::size_t max_in_flight = 4;
    std::chrono::milliseconds per_host_delay{0};
    std::size_t retries = 0;

    /// URLs normalized with duplicates removed (first occurrence kept).
    /// Malformed URLs are kept verbatim so they are reported as failures.
    std::vector<std::string> normalized_urls() const;
};

struct PageFailure {
    std::string url;
    std::size_t attempts = 0;
    std::string reason;
};

struct CollectionReport {
    std::size_t fetched = 0;      // URLs processed
    std::size_t pages_stored = 0; // pages fetched, parsed and committed
    std::size_t failed = 0;       // pages given up on
    std::size_t parsed = 0;       // observations parsed from stored pages
    std::size_t quarantined = 0;
    std::size_t stored = 0;       // new unique records appended
    std::size_t duplicates_dropped = 0;
    std::size_t attempts = 0;     // fetch requests issued
    std::size_t peak_in_flight = 0;
    std::vector<PageFailure> failures;
    bool aborted = false;
    std::string abort_reason;

    bool reconciles() const noexcept { return fetched == pages_stored + failed && parsed == stored + duplicates_dropped; }
};

/// Thrown when the store fails mid-run; carries the report so far.
class CollectionAborted : public Error {
public:
    CollectionAborted(const std::string& message, CollectionReport report)
        : Error(ErrorKind::Store, message), report_(std::move(report)) {}
    const CollectionReport& report() const noexcept { return report_; }

private:
    CollectionReport report_;
};

/// Fetches every URL of the plan with a bounded worker set sharing one
/// queue. Pages are committed to the store in plan order, so the
/// first-seen record for a key is the same across runs.
CollectionReport run_collection(const CollectionPlan& plan, SourceClient& source, ProxyPool* pool,
                                RecordStore& store, const ParserConfig& parser = {});

} // namespace fuelgeo::ingest
