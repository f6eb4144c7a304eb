#pragma once

#include "shl/error.hpp"
#include "shl/special_functions.hpp"
#include "shl/ball_reference.hpp"
#include "shl/perturbed_disk.hpp"
#include "shl/spectra.hpp"
#include "shl/stability.hpp"
#include "shl/pde_oracle.hpp"
#include "shl/parallel.hpp"
#include "shl/verification.hpp"
#include "shl/counterexample.hpp"
#include "shl/io.hpp"
#include "shl/version.hpp"
