#include "limid/jsonio.hpp"
#include "limid/problems.hpp"
#include <CLI11.hpp>
int main() { return 0; }
