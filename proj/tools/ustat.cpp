#include <iostream>
#include <vector>

#include "ustat/cli.hpp"
#include "ustat/error.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const ustat::cli::RunConfig cfg = ustat::cli::parse_args(args);
        return ustat::cli::run_command(cfg, std::cout);
    } catch (const ustat::cli::HelpRequested& help) {
        std::cout << help.text;
        return 0;
    } catch (const ustat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
