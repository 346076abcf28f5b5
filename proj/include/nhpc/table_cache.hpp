#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace nhpc {

// Completed tables keyed by scenario fingerprint; a cached table is reused whenever it
// already covers the requested m_max.
template <class Tables>
class TableCache {
public:
    template <class Build>
    std::shared_ptr<const Tables> get(const std::string& key, int m_max, Build&& build) {
        {
            std::lock_guard lock(mu_);
            auto it = entries_.find(key);
            if (it != entries_.end() && it->second->m_max >= m_max) return it->second;
        }
        auto fresh = std::make_shared<const Tables>(build(m_max));
        std::lock_guard lock(mu_);
        auto& slot = entries_[key];
        if (!slot || slot->m_max < fresh->m_max) slot = fresh;
        return slot;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return entries_.size();
    }

private:
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<const Tables>> entries_;
};

}  // namespace nhpc
