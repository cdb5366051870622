#pragma once

#include "klr/cartan.hpp"
#include "klr/coxeter.hpp"
#include "klr/error.hpp"
#include "klr/flag_oracle.hpp"
#include "klr/hecke.hpp"
#include "klr/kltable.hpp"
#include "klr/laurent.hpp"
#include "klr/multiplicity.hpp"
