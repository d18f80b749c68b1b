#include <iostream>

#include "ecomason/service.hpp"

int main(int argc, char** argv) { return ecomason::cli_dispatch(argc, argv, std::cout, std::cerr); }
