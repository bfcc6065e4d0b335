#ifndef SICS_SICS_HPP
#define SICS_SICS_HPP

#include "sics/error.hpp"
#include "sics/matrix.hpp"
#include "sics/support.hpp"
#include "sics/rank2.hpp"
#include "sics/line_minimizer.hpp"
#include "sics/newton.hpp"
#include "sics/cwoa.hpp"
#include "sics/datagen.hpp"

#endif // SICS_SICS_HPP
