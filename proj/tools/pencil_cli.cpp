#include "pencil/cli.hpp"

int main(int argc, char** argv) { return pencil::dispatch(argc, argv); }
