#pragma once

#include "spectra4/potential.hpp"
#include "spectra4/struct_matrices.hpp"
#include "spectra4/ladder.hpp"
#include "spectra4/parallel.hpp"
#include "spectra4/monodromy.hpp"
#include "spectra4/galerkin.hpp"
#include "spectra4/asymptotics.hpp"
#include "spectra4/config.hpp"
#include "spectra4/report.hpp"
#include "spectra4/app.hpp"
