#pragma once

#include "ctbks/banded.hpp"
#include "ctbks/scenarios.hpp"
#include "ctbks/scheme.hpp"
#include "ctbks/stepper.hpp"
#include "ctbks/trig_basis.hpp"
