#include <iostream>

#include "qslab/acceptance.hpp"

int main() { return qslab::run_acceptance(std::cout) == 0 ? 0 : 1; }
