#include "banditvote/cli.hpp"

int main(int argc, char** argv) { return banditvote::cli(argc, argv); }
