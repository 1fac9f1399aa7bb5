#include "fuelgeo/ingest/store.hpp"

#include <filesystem>
#include <sstream>

#include "fuelgeo/error.hpp"
#include "fuelgeo/text.hpp"

namespace fuelgeo::ingest {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

ObservationStore::ObservationStore(std::string path) : path_(std::move(path)) {
    const auto parent = std::filesystem::path(path_).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    rebuild_index();
    records_.open(path_, std::ios::binary | std::ios::app);
    if (!records_) throw Error(ErrorKind::Store, "cannot open observation store " + path_);
}

void ObservationStore::rebuild_index() {
    const auto stored = load(path_);
    std::unordered_set<std::string> from_records;
    for (const auto& o : stored) from_records.insert(dedup_key(o));

    std::unordered_set<std::string> from_index;
    const std::string idx = read_file(index_path());
    for (auto line : split_lines(idx)) {
        if (!line.empty()) from_index.emplace(line);
    }
    keys_ = std::move(from_records);
    if (from_index != keys_) {
        std::ofstream rewrite(index_path(), std::ios::binary | std::ios::trunc);
        if (!rewrite) throw Error(ErrorKind::Store, "cannot write store index " + index_path());
        for (const auto& o : stored) rewrite << dedup_key(o) << '\n';
    }
    index_.open(index_path(), std::ios::binary | std::ios::app);
    if (!index_) throw Error(ErrorKind::Store, "cannot open store index " + index_path());
}

bool ObservationStore::append(const PriceObservation& obs) {
    std::lock_guard lock(mutex_);
    std::string key = dedup_key(obs);
    if (keys_.count(key)) return false;
    records_ << format_record(obs) << '\n';
    index_ << key << '\n';
    if (!records_ || !index_) throw Error(ErrorKind::Store, "write to observation store " + path_ + " failed");
    keys_.insert(std::move(key));
    return true;
}

void ObservationStore::flush() {
    std::lock_guard lock(mutex_);
    records_.flush();
    index_.flush();
    if (!records_ || !index_) throw Error(ErrorKind::Store, "flush of observation store " + path_ + " failed");
}

std::size_t ObservationStore::size() const {
    std::lock_guard lock(mutex_);
    return keys_.size();
}

bool ObservationStore::contains(const std::string& key) const {
    std::lock_guard lock(mutex_);
    return keys_.count(key) > 0;
}

std::vector<PriceObservation> ObservationStore::load(const std::string& path) {
    if (!std::filesystem::exists(path)) return {};
    const std::string body = read_file(path);
    ParserConfig permissive;
    permissive.min_price = -1.0;
    permissive.max_price = 1e300;
    auto doc = parse_price_record(body, path, permissive);
    return std::move(doc.observations);
}

bool MemoryStore::append(const PriceObservation& obs) {
    std::lock_guard lock(mutex_);
    if (!keys_.insert(dedup_key(obs)).second) return false;
    records_.push_back(obs);
    return true;
}

std::size_t MemoryStore::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

std::vector<PriceObservation> MemoryStore::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

} // namespace fuelgeo::ingest
