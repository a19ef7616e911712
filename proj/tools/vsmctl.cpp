#include "vsm/cli/app.hpp"

int main(int argc, char** argv) { return vsm::cli::run(argc, argv); }
