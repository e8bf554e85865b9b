#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "lss/errors.hpp"

namespace lss::detail {

/// Interning table for fixed-width vectors of 64-bit words, open
/// addressing over a flat pool.
class StateTable {
public:
    StateTable(std::size_t width, std::size_t cap) : width_(width), cap_(cap) {
        slots_.assign(1024, -1);
    }

    std::size_t size() const { return count_; }
    std::size_t width() const { return width_; }
    const std::uint64_t* at(std::size_t id) const { return pool_.data() + id * width_; }

    /// Returns (id, inserted). Throws BudgetExceeded past the cap.
    std::pair<int, bool> intern(const std::uint64_t* key) {
        if ((count_ + 1) * 2 > slots_.size()) grow();
        std::size_t mask = slots_.size() - 1;
        std::size_t h = hash(key) & mask;
        while (slots_[h] >= 0) {
            if (std::memcmp(at(slots_[h]), key, width_ * 8) == 0) return {slots_[h], false};
            h = (h + 1) & mask;
        }
        if (count_ >= cap_)
            throw BudgetExceeded("state budget of " + std::to_string(cap_) + " exceeded");
        pool_.insert(pool_.end(), key, key + width_);
        slots_[h] = static_cast<int>(count_);
        return {static_cast<int>(count_++), true};
    }

private:
    std::size_t hash(const std::uint64_t* key) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (std::size_t i = 0; i < width_; ++i) {
            h ^= key[i] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
        }
        return static_cast<std::size_t>(h ^ (h >> 33));
    }
    void grow() {
        std::vector<int> old(slots_.size() * 2, -1);
        old.swap(slots_);
        std::size_t mask = slots_.size() - 1;
        for (std::size_t id = 0; id < count_; ++id) {
            std::size_t h = hash(at(id)) & mask;
            while (slots_[h] >= 0) h = (h + 1) & mask;
            slots_[h] = static_cast<int>(id);
        }
    }

    std::size_t width_;
    std::size_t cap_;
    std::size_t count_ = 0;
    std::vector<std::uint64_t> pool_;
    std::vector<int> slots_;
};

}  // namespace lss::detail
