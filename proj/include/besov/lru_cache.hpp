#pragma once

#include <cstddef>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace besov {

// Small thread-safe LRU map. Values are immutable once inserted and handed out as shared_ptr,
// so readers keep them alive across evictions. With capacity 0 every lookup recomputes.
template <class Key, class Value>
class LruCache {
public:
    explicit LruCache(std::size_t capacity) : capacity_(capacity) {}

    std::shared_ptr<const Value> get_or_compute(const Key& key, const std::function<Value()>& compute) const {
        if (capacity_ == 0) return std::make_shared<const Value>(compute());
        {
            std::lock_guard lock(mu_);
            auto it = index_.find(key);
            if (it != index_.end()) {
                order_.splice(order_.begin(), order_, it->second);
                ++hits_;
                return it->second->second;
            }
        }
        // computed outside the lock; a racing duplicate computation yields an identical value
        auto value = std::make_shared<const Value>(compute());
        std::lock_guard lock(mu_);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second->second;
        order_.emplace_front(key, value);
        index_[key] = order_.begin();
        while (order_.size() > capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
        return value;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return order_.size();
    }
    std::size_t hits() const {
        std::lock_guard lock(mu_);
        return hits_;
    }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    using Entry = std::pair<Key, std::shared_ptr<const Value>>;
    std::size_t capacity_;
    mutable std::mutex mu_;
    mutable std::list<Entry> order_;
    mutable std::unordered_map<Key, typename std::list<Entry>::iterator> index_;
    mutable std::size_t hits_ = 0;
};

}  // namespace besov
