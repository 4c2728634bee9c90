#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include "chfsi/linalg.hpp"

namespace chfsi::detail {

/// Runs fn(first, count) over fixed column tiles of [0, total).
///
/// Tile boundaries depend only on `total` and `exec`, never on scheduling.
/// Tiles are dealt round-robin to the workers; the first exception wins.
template <class Fn>
void for_each_tile(Index total, const Exec& exec, Fn&& fn) {
    if (total <= 0) return;
    const int workers = std::max(1, exec.workers);
    Index tile = exec.tile_cols > 0 ? exec.tile_cols : (total + workers - 1) / workers;
    tile = std::max<Index>(tile, 1);
    const Index tiles = (total + tile - 1) / tile;

    auto run_worker = [&](int w) {
        for (Index t = w; t < tiles; t += workers) {
            const Index first = t * tile;
            fn(first, std::min(tile, total - first));
        }
    };

    if (workers == 1 || tiles == 1) {
        for (Index t = 0; t < tiles; ++t) {
            const Index first = t * tile;
            fn(first, std::min(tile, total - first));
        }
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (int w = 1; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    run_worker(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        try {
            run_worker(0);
        } catch (...) {
            errors[0] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace chfsi::detail
