#pragma once

#include "deltacnn/change_map.hpp"
#include "deltacnn/delta_layers.hpp"
#include "deltacnn/dense_layers.hpp"
#include "deltacnn/errors.hpp"
#include "deltacnn/geometry.hpp"
#include "deltacnn/io.hpp"
#include "deltacnn/metrics.hpp"
#include "deltacnn/model.hpp"
#include "deltacnn/tensor.hpp"
