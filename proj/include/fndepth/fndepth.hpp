#ifndef FNDEPTH_FNDEPTH_HPP
#define FNDEPTH_FNDEPTH_HPP

#include "fndepth/core.hpp"
#include "fndepth/depths.hpp"
#include "fndepth/error.hpp"
#include "fndepth/experiments.hpp"
#include "fndepth/io.hpp"
#include "fndepth/medians.hpp"
#include "fndepth/simulate.hpp"

#endif  // FNDEPTH_FNDEPTH_HPP
