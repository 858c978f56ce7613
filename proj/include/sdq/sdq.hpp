// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sdq authors

#pragma once

// Umbrella header for the sdq library.

#include "sdq/assignment.hpp"
#include "sdq/baselines.hpp"
#include "sdq/channel.hpp"
#include "sdq/cost.hpp"
#include "sdq/dp.hpp"
#include "sdq/error.hpp"
#include "sdq/idp.hpp"
#include "sdq/io.hpp"
#include "sdq/matrix.hpp"
#include "sdq/oracle.hpp"
#include "sdq/pam.hpp"
#include "sdq/report.hpp"
#include "sdq/rng.hpp"
#include "sdq/smawk.hpp"
#include "sdq/synth.hpp"
