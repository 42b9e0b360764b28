//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include "liemom/config.hpp"
#include "liemom/diagnostics.hpp"
#include "liemom/dlog.hpp"
#include "liemom/errors.hpp"
#include "liemom/experiments.hpp"
#include "liemom/io.hpp"
#include "liemom/optimizers.hpp"
#include "liemom/potentials.hpp"
#include "liemom/random.hpp"
#include "liemom/so_n.hpp"
#include "liemom/svg.hpp"
#include "liemom/trajectory.hpp"
#include "liemom/verify.hpp"
