#pragma once

#include <fstream>
#include <mutex>
#include <string>
#include <unordered_set>
#include <vector>

#include "fuelgeo/ingest/records.hpp"

namespace fuelgeo::ingest {

/// Destination for collected observations with set semantics on dedup_key().
class RecordStore {
public:
    virtual ~RecordStore() = default;
    /// Returns false when the key was already stored. Throws Error(Store)
    /// when the write fails.
    virtual bool append(const PriceObservation& obs) = 0;
    virtual void flush() {}
    virtual std::size_t size() const = 0;
};

/// Append-only line file of price records plus a sidecar file of seen keys
/// (`<path>.keys`). The sidecar is rebuilt from the records when missing or
/// out of step.
class ObservationStore : public RecordStore {
public:
    explicit ObservationStore(std::string path);

    bool append(const PriceObservation& obs) override;
    void flush() override;
    std::size_t size() const override;
    bool contains(const std::string& key) const;

    const std::string& path() const noexcept { return path_; }
    std::string index_path() const { return path_ + ".keys"; }

    /// Every stored record, in append order.
    static std::vector<PriceObservation> load(const std::string& path);

private:
    void rebuild_index();

    std::string path_;
    mutable std::mutex mutex_;
    std::unordered_set<std::string> keys_;
    std::ofstream records_;
    std::ofstream index_;
};

/// Non-persistent store, mainly for tests.
class MemoryStore : public RecordStore {
public:
    bool append(const PriceObservation& obs) override;
    std::size_t size() const override;
    std::vector<PriceObservation> records() const;

private:
    mutable std::mutex mutex_;
    std::unordered_set<std::string> keys_;
    std::vector<PriceObservation> records_;
};

} // namespace fuelgeo::ingest
