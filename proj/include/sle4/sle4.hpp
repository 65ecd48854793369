#pragma once

#include "sle4/boundary.hpp"
#include "sle4/checks.hpp"
#include "sle4/correlators.hpp"
#include "sle4/error.hpp"
#include "sle4/loewner.hpp"
#include "sle4/probabilities.hpp"
#include "sle4/rng.hpp"
#include "sle4/sde.hpp"
#include "sle4/special_functions.hpp"
#include "sle4/vector_field.hpp"
