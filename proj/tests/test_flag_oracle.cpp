#include <catch2/catch_amalgamated.hpp>
#include "klr/flag_oracle.hpp"
