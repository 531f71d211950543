#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace wifitrack {

// Interned, immutable string handle. Equality is pointer equality; ordering
// is by string value. A default-constructed Symbol is null, which is distinct
// from the interned empty string.
class Symbol {
public:
    Symbol() = default;
    explicit Symbol(std::string_view text);

    bool is_null() const { return ptr_ == nullptr; }
    const std::string& str() const;

    friend bool operator==(Symbol a, Symbol b) { return a.ptr_ == b.ptr_; }
    friend std::strong_ordering operator<=>(Symbol a, Symbol b);

    std::size_t hash() const { return std::hash<const void*>{}(ptr_); }

private:
    const std::string* ptr_ = nullptr;
};

}  // namespace wifitrack

template <>
struct std::hash<wifitrack::Symbol> {
    std::size_t operator()(wifitrack::Symbol s) const noexcept { return s.hash(); }
};
