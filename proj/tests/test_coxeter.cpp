#include <catch2/catch_amalgamated.hpp>
#include "klr/coxeter.hpp"
