#pragma once
// workspace.hpp - Scratch-limb management.
//
// Heavy operations need temporaries sized by their inputs, and they allocate
// and release them at high frequency. Instead of hitting the heap each time,
// buffers come from a Workspace: a single-owner cache of blocks drawn from a
// shared BlockPool. Freed blocks stay cached for the next acquisition of the
// same size, so steady-state repeated operations do not allocate at all.
//
// Ownership rules:
//   - A Workspace is used by one task at a time.
//   - The BlockPool is thread-safe; concurrent tasks each construct their own
//     Workspace on the same pool and receive disjoint blocks.
//   - A ScratchBuffer's contents are undefined until written.

#include <atomic>
#include <cassert>
#include <cstddef>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "bigslice/limb_ops.hpp"

namespace bigslice {

class BlockPool {
public:
    struct Block {
        std::unique_ptr<limb[]> data;
        std::size_t capacity = 0;
    };

    static BlockPool& global() {
        static BlockPool pool;
        return pool;
    }

    Block take(std::size_t min_limbs) {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            std::size_t best = free_.size();
            for (std::size_t i = 0; i < free_.size(); i++) {
                if (free_[i].capacity >= min_limbs &&
                    (best == free_.size() || free_[i].capacity < free_[best].capacity)) {
                    best = i;
                }
            }
            if (best != free_.size()) {
                Block b = std::move(free_[best]);
                free_.erase(free_.begin() + static_cast<std::ptrdiff_t>(best));
                return b;
            }
        }
        Block b;
        b.data = std::make_unique<limb[]>(min_limbs);
        b.capacity = min_limbs;
        return b;
    }

    void give_back(Block b) {
        if (b.capacity == 0) return;
        std::lock_guard<std::mutex> lock(mutex_);
        free_.push_back(std::move(b));
    }

    // Live-acquisition accounting, in requested limbs, across all workspaces
    // on this pool. Used by tests to validate workspace bounds.
    void note_acquire(std::size_t limbs) {
        std::size_t now = live_.fetch_add(limbs, std::memory_order_relaxed) + limbs;
        std::size_t hw = high_water_.load(std::memory_order_relaxed);
        while (now > hw &&
               !high_water_.compare_exchange_weak(hw, now, std::memory_order_relaxed)) {
        }
    }
    void note_release(std::size_t limbs) {
        live_.fetch_sub(limbs, std::memory_order_relaxed);
    }
    std::size_t live_limbs() const { return live_.load(std::memory_order_relaxed); }
    std::size_t high_water_limbs() const { return high_water_.load(std::memory_order_relaxed); }
    void reset_high_water() { high_water_.store(live_limbs(), std::memory_order_relaxed); }

private:
    std::mutex mutex_;
    std::vector<Block> free_;
    std::atomic<std::size_t> live_{0};
    std::atomic<std::size_t> high_water_{0};
};

class Workspace;

// RAII handle to one scratch buffer. Returns the block to its workspace on
// destruction.
class ScratchBuffer {
public:
    ScratchBuffer() = default;
    ScratchBuffer(const ScratchBuffer&) = delete;
    ScratchBuffer& operator=(const ScratchBuffer&) = delete;
    ScratchBuffer(ScratchBuffer&& other) noexcept { swap(other); }
    ScratchBuffer& operator=(ScratchBuffer&& other) noexcept {
        release();
        swap(other);
        return *this;
    }
    ~ScratchBuffer() { release(); }

    limb* data() { return block_.data.get(); }
    const limb* data() const { return block_.data.get(); }
    std::size_t size() const { return size_; }
    std::span<limb> span() { return {block_.data.get(), size_}; }

    void release();

private:
    friend class Workspace;
    ScratchBuffer(Workspace* ws, BlockPool::Block block, std::size_t size)
        : ws_(ws), block_(std::move(block)), size_(size) {}
    void swap(ScratchBuffer& o) {
        std::swap(ws_, o.ws_);
        std::swap(block_, o.block_);
        std::swap(size_, o.size_);
    }

    Workspace* ws_ = nullptr;
    BlockPool::Block block_;
    std::size_t size_ = 0;
};

class Workspace {
public:
    explicit Workspace(BlockPool& pool = BlockPool::global()) : pool_(&pool) {}
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
    ~Workspace() {
        assert(in_use_ == 0);
        for (auto& b : cached_) pool_->give_back(std::move(b));
    }

    ScratchBuffer acquire(std::size_t limbs) {
        BlockPool::Block block = take_cached(limbs);
        in_use_ += limbs;
        if (in_use_ > high_water_) high_water_ = in_use_;
        pool_->note_acquire(limbs);
#ifndef NDEBUG
        // Poison so that read-before-write surfaces as garbage, not zeros.
        for (std::size_t i = 0; i < limbs; i++) block.data[i] = 0xDBDBDBDBDBDBDBDBULL;
#endif
        return ScratchBuffer(this, std::move(block), limbs);
    }

    std::size_t in_use() const { return in_use_; }
    std::size_t high_water() const { return high_water_; }
    BlockPool& pool() { return *pool_; }

private:
    friend class ScratchBuffer;

    BlockPool::Block take_cached(std::size_t limbs) {
        std::size_t best = cached_.size();
        for (std::size_t i = 0; i < cached_.size(); i++) {
            if (cached_[i].capacity >= limbs &&
                (best == cached_.size() || cached_[i].capacity < cached_[best].capacity)) {
                best = i;
            }
        }
        if (best != cached_.size()) {
            BlockPool::Block b = std::move(cached_[best]);
            cached_.erase(cached_.begin() + static_cast<std::ptrdiff_t>(best));
            return b;
        }
        return pool_->take(limbs);
    }

    void put_back(BlockPool::Block block, std::size_t limbs) {
        assert(in_use_ >= limbs);
        in_use_ -= limbs;
        pool_->note_release(limbs);
        cached_.push_back(std::move(block));
    }

    BlockPool* pool_;
    std::vector<BlockPool::Block> cached_;
    std::size_t in_use_ = 0;
    std::size_t high_water_ = 0;
};

inline void ScratchBuffer::release() {
    if (ws_ != nullptr) {
        ws_->put_back(std::move(block_), size_);
        ws_ = nullptr;
        size_ = 0;
    }
}

namespace detail {

// Per-thread workspace for the convenience entry points.
inline Workspace& tls_workspace() {
    thread_local Workspace ws(BlockPool::global());
    return ws;
}

} // namespace detail
} // namespace bigslice
