#include "wifitrack/symbol.hpp"

#include <mutex>
#include <unordered_set>

namespace wifitrack {

namespace {

struct InternPool {
    std::mutex mutex;
    std::unordered_set<std::string> strings;
};

InternPool& pool() {
    static InternPool instance;
    return instance;
}

const std::string& empty_string() {
    static const std::string empty;
    return empty;
}

}  // namespace

Symbol::Symbol(std::string_view text) {
    auto& p = pool();
    std::lock_guard lock(p.mutex);
    // unordered_set nodes are never moved, so element addresses are stable.
    ptr_ = &*p.strings.emplace(text).first;
}

const std::string& Symbol::str() const { return ptr_ ? *ptr_ : empty_string(); }

std::strong_ordering operator<=>(Symbol a, Symbol b) {
    if (a.ptr_ == b.ptr_) return std::strong_ordering::equal;
    if (!a.ptr_) return std::strong_ordering::less;
    if (!b.ptr_) return std::strong_ordering::greater;
    const int c = a.ptr_->compare(*b.ptr_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace wifitrack
