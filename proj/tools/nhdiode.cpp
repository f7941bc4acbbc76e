#include "nhdiode/nhdiode.hpp"
#include <cstdio>
int main() { std::puts(nhdiode::kVersion); return 0; }
