#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fuelgeo/ingest/proxy_pool.hpp"

namespace fuelgeo::ingest {

struct Url {
    std::string scheme;
    std::string host;
    int port = 0; // 0 when absent
    std::string path;

    std::string str() const;
};

/// Parses scheme://host[:port]/path; nullopt for malformed input.
std::optional<Url> parse_url(const std::string& text);
/// Lowercases scheme and host, drops default ports and fragments.
std::optional<std::string> normalize_url(const std::string& text);

struct FetchResult {
    int status = 0; // HTTP-style: 200 is success
    std::string body;
};

/// Anything that turns a URL into a document.
class SourceClient {
public:
    virtual ~SourceClient() = default;
    /// May throw on transport errors; a non-200 status is also a failure.
    virtual FetchResult fetch(const Url& url, const ProxyEndpoint* proxy) = 0;
};

/// In-memory source with failure injection and concurrency instrumentation.
class MockSource : public SourceClient {
public:
    void add_page(const std::string& url, std::string body);
    /// Every request for `url` answers 500.
    void fail_always(const std::string& url);
    /// The first `count` requests for `url` answer 503.
    void fail_first(const std::string& url, std::size_t count);
    void set_latency(std::chrono::milliseconds latency) { latency_ = latency; }

    FetchResult fetch(const Url& url, const ProxyEndpoint* proxy) override;

    std::size_t attempts(const std::string& url) const;
    std::size_t total_requests() const;
    std::size_t peak_concurrency() const;
    /// Request start times per host, in arrival order.
    std::vector<std::chrono::steady_clock::time_point> request_times(const std::string& host) const;
    std::map<std::string, std::size_t> proxy_usage() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::string> pages_;
    std::set<std::string> always_fail_;
    std::map<std::string, std::size_t> fail_budget_;
    std::map<std::string, std::size_t> attempts_;
    std::map<std::string, std::vector<std::chrono::steady_clock::time_point>> starts_;
    std::map<std::string, std::size_t> proxy_usage_;
    std::chrono::milliseconds latency_{0};
    std::size_t in_flight_ = 0;
    std::size_t peak_ = 0;
};

/// file:// URLs read from the local filesystem.
class FileSource : public SourceClient {
public:
    FetchResult fetch(const Url& url, const ProxyEndpoint* proxy) override;
};

/// http:// URLs; a proxy endpoint "host:port" is used as the forwarding proxy.
class HttpSource : public SourceClient {
public:
    explicit HttpSource(std::chrono::milliseconds timeout = std::chrono::seconds(10)) : timeout_(timeout) {}
    FetchResult fetch(const Url& url, const ProxyEndpoint* proxy) override;

private:
    std::chrono::milliseconds timeout_;
};

/// Dispatches on URL scheme.
class SchemeRouter : public SourceClient {
public:
    void add(const std::string& scheme, std::shared_ptr<SourceClient> client);
    FetchResult fetch(const Url& url, const ProxyEndpoint* proxy) override;

private:
    std::map<std::string, std::shared_ptr<SourceClient>> clients_;
};

} // namespace fuelgeo::ingest
