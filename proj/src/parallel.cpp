#include "exsum/parallel.hpp"

#include <cstdlib>
#include <string>

namespace exsum {

int thread_cap(int requested) {
    if (requested < 1) return 1;
    if (const char* env = std::getenv("EXSUM_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1 && cap < requested) return cap;
        } catch (...) {
            // unparsable values leave the cap at the requested rank count
        }
    }
    return requested;
}

}  // namespace exsum
