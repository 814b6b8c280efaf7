#include "delaynet/cli_app.hpp"

int main(int argc, char** argv) { return delaynet::cli::run(argc, argv); }
