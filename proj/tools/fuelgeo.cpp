#include "fuelgeo/cli.hpp"

int main(int argc, char** argv) {
    return fuelgeo::cli::execute(argc, argv);
}
