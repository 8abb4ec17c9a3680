#include "equid/cli.hpp"

int main(int argc, char** argv) { return equid::dispatch(argc, argv); }
