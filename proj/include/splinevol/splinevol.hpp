// Copyright 2026 The splinevol Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "splinevol/core.hpp"
#include "splinevol/encoder.hpp"
#include "splinevol/fields.hpp"
#include "splinevol/grid.hpp"
#include "splinevol/image.hpp"
#include "splinevol/interpolators.hpp"
#include "splinevol/knots.hpp"
#include "splinevol/metrics.hpp"
#include "splinevol/model.hpp"
#include "splinevol/model_io.hpp"
#include "splinevol/renderer.hpp"
#include "splinevol/sources.hpp"
#include "splinevol/transfer.hpp"
