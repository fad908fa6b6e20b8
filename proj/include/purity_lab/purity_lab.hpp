#pragma once

#include "purity_lab/dims.hpp"
#include "purity_lab/errors.hpp"
#include "purity_lab/ket.hpp"
#include "purity_lab/oracle.hpp"
#include "purity_lab/parallel.hpp"
#include "purity_lab/rate.hpp"
#include "purity_lab/rational.hpp"
#include "purity_lab/report.hpp"
#include "purity_lab/separability.hpp"
#include "purity_lab/state.hpp"
#include "purity_lab/state_io.hpp"
#include "purity_lab/subset.hpp"
#include "purity_lab/validate.hpp"
#include "purity_lab/version.hpp"
