#pragma once

#include "qspin/dynamics.hpp"
#include "qspin/errors.hpp"
#include "qspin/interactions.hpp"
#include "qspin/lanczos.hpp"
#include "qspin/lattice.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"
#include "qspin/random.hpp"
#include "qspin/spectra.hpp"
#include "qspin/spin_algebra.hpp"
#include "qspin/states.hpp"
#include "qspin/symmetry.hpp"
