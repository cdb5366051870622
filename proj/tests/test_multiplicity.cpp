#include <catch2/catch_amalgamated.hpp>
#include "klr/multiplicity.hpp"
