#include "fuelgeo/ingest/source.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "fuelgeo/error.hpp"

namespace fuelgeo::ingest {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

std::string Url::str() const {
    std::string out = scheme + "://" + host;
    if (port != 0) out += ":" + std::to_string(port);
    out += path;
    return out;
}

std::optional<Url> parse_url(const std::string& text) {
    const auto sep = text.find("://");
    if (sep == std::string::npos || sep == 0) return std::nullopt;
    Url url;
    url.scheme = text.substr(0, sep);
    if (!std::isalpha(static_cast<unsigned char>(url.scheme[0]))) return std::nullopt;
    for (unsigned char c : url.scheme) {
        if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return std::nullopt;
    }
    const std::string rest = text.substr(sep + 3);
    const auto slash = rest.find('/');
    std::string authority = rest.substr(0, slash);
    url.path = slash == std::string::npos ? "/" : rest.substr(slash);
    if (const auto hash = url.path.find('#'); hash != std::string::npos) url.path.erase(hash);
    if (const auto colon = authority.rfind(':'); colon != std::string::npos) {
        const std::string port = authority.substr(colon + 1);
        if (port.empty() || port.size() > 5 ||
            !std::all_of(port.begin(), port.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
            return std::nullopt;
        }
        url.port = std::stoi(port);
        if (url.port < 1 || url.port > 65535) return std::nullopt;
        authority.erase(colon);
    }
    url.host = authority;
    if (url.host.empty() && lower(url.scheme) != "file") return std::nullopt;
    for (unsigned char c : url.host) {
        if (std::isspace(c) || c == '@' || c == '?') return std::nullopt;
    }
    return url;
}

std::optional<std::string> normalize_url(const std::string& text) {
    auto url = parse_url(std::string(text));
    if (!url) return std::nullopt;
    url->scheme = lower(url->scheme);
    url->host = lower(url->host);
    if ((url->scheme == "http" && url->port == 80) || (url->scheme == "https" && url->port == 443)) url->port = 0;
    return url->str();
}

void MockSource::add_page(const std::string& url, std::string body) {
    std::lock_guard lock(mutex_);
    pages_[url] = std::move(body);
}

void MockSource::fail_always(const std::string& url) {
    std::lock_guard lock(mutex_);
    always_fail_.insert(url);
}

void MockSource::fail_first(const std::string& url, std::size_t count) {
    std::lock_guard lock(mutex_);
    fail_budget_[url] = count;
}

FetchResult MockSource::fetch(const Url& url, const ProxyEndpoint* proxy) {
    const std::string key = url.str();
    {
        std::lock_guard lock(mutex_);
        attempts_[key] += 1;
        starts_[url.host].push_back(std::chrono::steady_clock::now());
        if (proxy) proxy_usage_[proxy->address] += 1;
        peak_ = std::max(peak_, ++in_flight_);
    }
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

    std::lock_guard lock(mutex_);
    --in_flight_;
    if (always_fail_.count(key)) return {500, "injected server error"};
    if (auto it = fail_budget_.find(key); it != fail_budget_.end() && it->second > 0) {
        --it->second;
        return {503, "injected transient error"};
    }
    const auto page = pages_.find(key);
    if (page == pages_.end()) return {404, "not found"};
    return {200, page->second};
}

std::size_t MockSource::attempts(const std::string& url) const {
    std::lock_guard lock(mutex_);
    const auto it = attempts_.find(url);
    return it == attempts_.end() ? 0 : it->second;
}

std::size_t MockSource::total_requests() const {
    std::lock_guard lock(mutex_);
    std::size_t total = 0;
    for (const auto& [url, n] : attempts_) total += n;
    return total;
}

std::size_t MockSource::peak_concurrency() const {
    std::lock_guard lock(mutex_);
    return peak_;
}

std::vector<std::chrono::steady_clock::time_point> MockSource::request_times(const std::string& host) const {
    std::lock_guard lock(mutex_);
    const auto it = starts_.find(host);
    return it == starts_.end() ? std::vector<std::chrono::steady_clock::time_point>{} : it->second;
}

std::map<std::string, std::size_t> MockSource::proxy_usage() const {
    std::lock_guard lock(mutex_);
    return proxy_usage_;
}

FetchResult FileSource::fetch(const Url& url, const ProxyEndpoint*) {
    std::ifstream in(url.path, std::ios::binary);
    if (!in) return {404, "cannot open " + url.path};
    std::ostringstream body;
    body << in.rdbuf();
    return {200, body.str()};
}

FetchResult HttpSource::fetch(const Url& url, const ProxyEndpoint* proxy) {
    httplib::Client client(url.host, url.port == 0 ? 80 : url.port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    if (proxy && !proxy->address.empty()) {
        const auto colon = proxy->address.rfind(':');
        if (colon == std::string::npos) {
            throw Error(ErrorKind::InvalidArgument, "proxy address must be host:port: " + proxy->address);
        }
        client.set_proxy(proxy->address.substr(0, colon), std::stoi(proxy->address.substr(colon + 1)));
    }
    auto res = client.Get(url.path);
    if (!res) throw Error(ErrorKind::Io, "request to " + url.str() + " failed: " + httplib::to_string(res.error()));
    return {res->status, res->body};
}

void SchemeRouter::add(const std::string& scheme, std::shared_ptr<SourceClient> client) {
    clients_[lower(scheme)] = std::move(client);
}

FetchResult SchemeRouter::fetch(const Url& url, const ProxyEndpoint* proxy) {
    const auto it = clients_.find(lower(url.scheme));
    if (it == clients_.end()) throw Error(ErrorKind::InvalidArgument, "no source client for scheme " + url.scheme);
    return it->second->fetch(url, proxy);
}

} // namespace fuelgeo::ingest
