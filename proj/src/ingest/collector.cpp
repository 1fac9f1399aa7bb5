#include "fuelgeo/ingest/collector.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

namespace fuelgeo::ingest {

namespace {

class HostThrottle {
public:
    explicit HostThrottle(std::chrono::milliseconds delay) : delay_(delay) {}

    void wait(const std::string& host) {
        if (delay_.count() <= 0) return;
        std::chrono::steady_clock::time_point slot;
        {
            std::lock_guard lock(mutex_);
            const auto now = std::chrono::steady_clock::now();
            auto [it, inserted] = next_.try_emplace(host, now);
            slot = std::max(now, it->second);
            it->second = slot + delay_;
        }
        std::this_thread::sleep_until(slot);
    }

private:
    std::chrono::milliseconds delay_;
    std::mutex mutex_;
    std::map<std::string, std::chrono::steady_clock::time_point> next_;
};

struct PageOutcome {
    bool ok = false;
    std::size_t attempts = 0;
    std::string reason;
    ParsedDocument document;
};

} // namespace

std::vector<std::string> CollectionPlan::normalized_urls() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& raw : urls) {
        const auto norm = normalize_url(raw);
        const std::string& key = norm ? *norm : raw;
        if (seen.insert(key).second) out.push_back(key);
    }
    return out;
}

CollectionReport run_collection(const CollectionPlan& plan, SourceClient& source, ProxyPool* pool,
                                RecordStore& store, const ParserConfig& parser) {
    if (plan.max_in_flight == 0) throw Error(ErrorKind::InvalidArgument, "max_in_flight must be positive");
    const std::vector<std::string> urls = plan.normalized_urls();
    const std::size_t total = urls.size();

    CollectionReport report;
    HostThrottle throttle(plan.per_host_delay);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> in_flight{0};
    std::atomic<std::size_t> peak{0};
    std::atomic<std::size_t> attempts{0};
    std::atomic<bool> abort{false};

    std::mutex commit_mutex;
    std::vector<std::optional<PageOutcome>> slots(total);
    std::size_t next_commit = 0;

    auto commit_ready = [&] {
        // commit_mutex held
        while (next_commit < total && slots[next_commit] && !report.aborted) {
            PageOutcome& page = *slots[next_commit];
            report.fetched += 1;
            if (!page.ok) {
                report.failed += 1;
                report.failures.push_back({urls[next_commit], page.attempts, page.reason});
            } else {
                try {
                    std::size_t added = 0, dup = 0;
                    for (const auto& obs : page.document.observations) {
                        (store.append(obs) ? added : dup) += 1;
                    }
                    store.flush();
                    report.pages_stored += 1;
                    report.parsed += page.document.observations.size();
                    report.quarantined += page.document.quarantined.size();
                    report.stored += added;
                    report.duplicates_dropped += dup;
                } catch (const std::exception& e) {
                    report.fetched -= 1;
                    report.aborted = true;
                    report.abort_reason = e.what();
                    abort = true;
                    return;
                }
            }
            page.document = {};
            ++next_commit;
        }
    };

    auto process = [&](std::size_t idx) {
        PageOutcome out;
        const auto url = parse_url(urls[idx]);
        if (!url) {
            out.reason = "malformed URL";
            return out;
        }
        for (std::size_t attempt = 0; attempt <= plan.retries && !abort; ++attempt) {
            throttle.wait(url->host);
            out.attempts += 1;
            attempts += 1;
            std::optional<ProxyLease> lease;
            try {
                if (pool) lease.emplace(*pool);
            } catch (const Error& e) {
                out.reason = e.what();
                return out; // pool exhausted: retrying cannot help
            }
            const std::size_t now = ++in_flight;
            for (std::size_t p = peak.load(); now > p && !peak.compare_exchange_weak(p, now);) {
            }
            FetchResult res;
            bool transported = true;
            try {
                res = source.fetch(*url, lease ? &lease->endpoint() : nullptr);
            } catch (const std::exception& e) {
                transported = false;
                out.reason = e.what();
            }
            --in_flight;
            if (!transported) continue;
            if (lease) lease->mark_success();
            if (res.status != 200) {
                out.reason = "status " + std::to_string(res.status);
                continue;
            }
            try {
                out.document = parse_price_record(res.body, urls[idx], parser);
                out.ok = true;
                out.reason.clear();
            } catch (const Error& e) {
                out.reason = e.what();
            }
            return out;
        }
        return out;
    };

    auto worker = [&] {
        for (std::size_t idx = next++; idx < total && !abort; idx = next++) {
            PageOutcome outcome = process(idx);
            std::lock_guard lock(commit_mutex);
            slots[idx] = std::move(outcome);
            commit_ready();
        }
    };

    {
        const std::size_t n_workers = std::min(plan.max_in_flight, std::max<std::size_t>(total, 1));
        std::vector<std::jthread> workers;
        workers.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
    }

    report.attempts = attempts;
    report.peak_in_flight = peak;
    if (report.aborted) {
        throw CollectionAborted("collection aborted: " + report.abort_reason, report);
    }
    return report;
}

} // namespace fuelgeo::ingest
