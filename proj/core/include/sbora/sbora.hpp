// Copyright 2026 The sbora Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sbora/accounting.hpp"
#include "sbora/adapter.hpp"
#include "sbora/autograd.hpp"
#include "sbora/basis.hpp"
#include "sbora/checkpoint.hpp"
#include "sbora/compose.hpp"
#include "sbora/errors.hpp"
#include "sbora/matrix.hpp"
#include "sbora/op_counters.hpp"
#include "sbora/quant.hpp"
#include "sbora/rng.hpp"
#include "sbora/training.hpp"
