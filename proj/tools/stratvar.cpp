#include "stratvar/cli.hpp"

int main(int argc, char** argv) { return stratvar::dispatch(argc, argv); }
