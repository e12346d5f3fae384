#include "chanest/parallel.hpp"

namespace chanest {

int& thread_count() {
    static int n = [] {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }();
    return n;
}

}  // namespace chanest
