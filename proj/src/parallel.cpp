#include "renvol/parallel.hpp"
#include "renvol/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace renvol {

double pairwise_sum(const double* x, size_t n)
{
    if (n <= 16) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

double max_abs(const std::vector<double>& x)
{
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

int thread_count()
{
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("RENVOL_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap >= 1) n = std::min(n, cap);
        } catch (const std::exception&) {
        }
    }
    return n;
}

void parallel_for(size_t n, const std::function<void(size_t, size_t)>& body, size_t min_chunk)
{
    if (n == 0) return;
    size_t workers = std::min<size_t>(thread_count(), std::max<size_t>(1, n / std::max<size_t>(1, min_chunk)));
    if (workers <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    size_t chunk = (n + workers - 1) / workers;
    for (size_t w = 0; w < workers; ++w) {
        size_t b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto& t : pool) t.join();
}

} // namespace renvol
