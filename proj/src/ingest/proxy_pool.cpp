#include "fuelgeo/ingest/proxy_pool.hpp"

#include "fuelgeo/error.hpp"

namespace fuelgeo::ingest {

ProxyPool::ProxyPool(std::vector<std::string> addresses, std::size_t failure_threshold)
    : threshold_(failure_threshold == 0 ? 1 : failure_threshold) {
    for (auto& a : addresses) endpoints_.push_back({std::move(a), ProxyStatus::Idle, 0, 0});
}

ProxyEndpoint ProxyPool::next() {
    std::lock_guard lock(mutex_);
    for (std::size_t step = 0; step < endpoints_.size(); ++step) {
        auto& e = endpoints_[(cursor_ + step) % endpoints_.size()];
        if (e.status == ProxyStatus::Failed) continue;
        cursor_ = (cursor_ + step + 1) % endpoints_.size();
        e.in_use += 1;
        e.status = ProxyStatus::InUse;
        return e;
    }
    throw Error(ErrorKind::PoolExhausted, "every proxy endpoint has failed");
}

ProxyEndpoint& ProxyPool::find(const std::string& address) {
    for (auto& e : endpoints_) {
        if (e.address == address) return e;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown proxy endpoint " + address);
}

void ProxyPool::release(const std::string& address, bool success) {
    std::lock_guard lock(mutex_);
    auto& e = find(address);
    if (e.in_use > 0) e.in_use -= 1;
    if (!success) e.failure_count += 1;
    if (e.failure_count >= threshold_) {
        e.status = ProxyStatus::Failed;
    } else {
        e.status = e.in_use > 0 ? ProxyStatus::InUse : ProxyStatus::Idle;
    }
}

void ProxyPool::reset(const std::string& address) {
    std::lock_guard lock(mutex_);
    auto& e = find(address);
    e.failure_count = 0;
    e.status = e.in_use > 0 ? ProxyStatus::InUse : ProxyStatus::Idle;
}

std::vector<ProxyEndpoint> ProxyPool::snapshot() const {
    std::lock_guard lock(mutex_);
    return endpoints_;
}

std::size_t ProxyPool::size() const {
    std::lock_guard lock(mutex_);
    return endpoints_.size();
}

} // namespace fuelgeo::ingest
