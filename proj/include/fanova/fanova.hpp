// SPDX-License-Identifier: MIT
#pragma once

#include "fanova/bins.hpp"
#include "fanova/density.hpp"
#include "fanova/error.hpp"
#include "fanova/model.hpp"
#include "fanova/purify.hpp"
#include "fanova/synth.hpp"
#include "fanova/tensor.hpp"
#include "fanova/trees.hpp"
#include "fanova/weights.hpp"
