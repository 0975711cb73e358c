#ifndef CZQ_HELMHOLTZ_HPP
#define CZQ_HELMHOLTZ_HPP

#include "czq/helmholtz/kernel.hpp"
#include "czq/helmholtz/local_correction.hpp"
#include "czq/helmholtz/operator.hpp"
#include "czq/helmholtz/solver.hpp"

#endif
