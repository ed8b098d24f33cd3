#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "maglat/scenario.hpp"

#include <cstdlib>

int main(int argc, char** argv) {
    // deterministic linear algebra unless the environment asks for more
    int jobs = 1;
    if (const char* env = std::getenv("MAGLAT_JOBS")) jobs = std::atoi(env);
    maglat::set_worker_threads(jobs > 0 ? jobs : 1);

    doctest::Context ctx;
    ctx.applyCommandLine(argc, argv);
    return ctx.run();
}
