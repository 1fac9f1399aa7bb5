#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

namespace fuelgeo::ingest {

enum class ProxyStatus { Idle, InUse, Failed };

struct ProxyEndpoint {
    std::string address; // host:port
    ProxyStatus status = ProxyStatus::Idle;
    std::size_t failure_count = 0;
    std::size_t in_use = 0;
};

/// Shared, synchronized round-robin pool of socket-proxy endpoints. An
/// endpoint whose failure count reaches the threshold is Failed and skipped
/// until reset.
class ProxyPool {
public:
    explicit ProxyPool(std::vector<std::string> addresses, std::size_t failure_threshold = 3);

    /// Next non-Failed endpoint in rotation, marked InUse. Throws
    /// Error(PoolExhausted) when every endpoint is Failed.
    ProxyEndpoint next();

    /// Ends one use of `address`; a failed request bumps its failure count.
    void release(const std::string& address, bool success);

    void reset(const std::string& address);

    std::vector<ProxyEndpoint> snapshot() const;
    std::size_t size() const;
    std::size_t failure_threshold() const noexcept { return threshold_; }

private:
    ProxyEndpoint& find(const std::string& address);

    mutable std::mutex mutex_;
    std::vector<ProxyEndpoint> endpoints_;
    std::size_t cursor_ = 0;
    std::size_t threshold_;
};

/// RAII lease: releases the endpoint as failed unless mark_success() ran.
class ProxyLease {
public:
    ProxyLease(ProxyPool& pool) : pool_(&pool), endpoint_(pool.next()) {}
    ProxyLease(const ProxyLease&) = delete;
    ProxyLease& operator=(const ProxyLease&) = delete;
    ~ProxyLease() {
        if (pool_) pool_->release(endpoint_.address, success_);
    }

    const ProxyEndpoint& endpoint() const noexcept { return endpoint_; }
    void mark_success() noexcept { success_ = true; }

private:
    ProxyPool* pool_;
    ProxyEndpoint endpoint_;
    bool success_ = false;
};

} // namespace fuelgeo::ingest
