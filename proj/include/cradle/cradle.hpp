#pragma once

// Everything except the file formats in io.hpp.

#include "cradle/adiabatic.hpp"
#include "cradle/composer.hpp"
#include "cradle/kernel.hpp"
#include "cradle/sampling.hpp"
#include "cradle/secular.hpp"
#include "cradle/spectra.hpp"
#include "cradle/types.hpp"
#include "cradle/unitary.hpp"
