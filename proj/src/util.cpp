#include "nsasym/util.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace nsasym {

int max_threads() {
    static const int cached = [] {
        const char* env = std::getenv("NSASYM_THREADS");
        if (!env) return 1;
        int v = std::atoi(env);
        if (v < 1) return 1;
        return std::min(v, 64);
    }();
    return cached;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
    const int nt = max_threads();
    if (nt <= 1 || count < 4096) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[15 - i] = hex[(h >> (4 * i)) & 0xf];
    }
    buf[16] = 0;
    return std::string(buf);
}

}  // namespace nsasym
