#include <catch2/catch_amalgamated.hpp>
#include "klr/kltable.hpp"
