#pragma once

#include "squareful/arith.hpp"
#include "squareful/bigint.hpp"
#include "squareful/errors.hpp"
#include "squareful/parallel.hpp"
#include "squareful/squareful.hpp"
#include "squareful/counting.hpp"
#include "squareful/omega.hpp"
#include "squareful/gauss.hpp"
#include "squareful/lfunctions.hpp"
#include "squareful/expsums.hpp"
#include "squareful/localdens.hpp"
#include "squareful/archimedean.hpp"
#include "squareful/constant.hpp"
#include "squareful/cli.hpp"
