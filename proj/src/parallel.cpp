#include "vatom/parallel.hpp"

#include <cstdlib>
#include <string>

namespace vatom {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("VATOM_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
            // fall through to the hardware count
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace vatom
