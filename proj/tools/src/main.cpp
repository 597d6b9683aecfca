#include <cstdlib>
#include <iostream>
#include <string>

#include "gspq/parallel.hpp"
#include "gspq_cli/commands.hpp"

int main(int argc, char** argv) {
    if (const char* env = std::getenv("GSPQ_THREADS"); env != nullptr && *env != '\0') {
        try {
            gspq::set_thread_count(static_cast<std::size_t>(std::stoul(env)));
        } catch (const std::exception&) {
            std::cerr << "GSPQ_THREADS must be a non-negative integer\n";
            return gspq::cli::kExitUsage;
        }
    }
    return gspq::cli::run(argc, argv, std::cout, std::cerr);
}
