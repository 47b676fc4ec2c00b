#include "phconn/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace phconn {

int default_thread_count() {
    const char* env = std::getenv("PHCONN_THREADS");
    if (env == nullptr) {
        return 1;
    }
    try {
        const int value = std::stoi(env);
        return value >= 1 ? value : 1;
    } catch (const std::exception&) {
        return 1;
    }
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, std::size_t)>& chunk) {
    if (count == 0) {
        return;
    }
    const std::size_t worker_count =
        std::min<std::size_t>(std::max(threads, 1), count);
    if (worker_count <= 1) {
        chunk(0, count);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(worker_count);
    const std::size_t per_worker = count / worker_count;
    const std::size_t remainder = count % worker_count;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < worker_count; ++w) {
        const std::size_t end = begin + per_worker + (w < remainder ? 1 : 0);
        workers.emplace_back([&chunk, begin, end] { chunk(begin, end); });
        begin = end;
    }
    for (auto& worker : workers) {
        worker.join();
    }
}

}  // namespace phconn
