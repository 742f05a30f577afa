/******************************************************************************
 * Copyright 2026 The idrem Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include "idrem/adaptation.hpp"
#include "idrem/closed_loop.hpp"
#include "idrem/config_io.hpp"
#include "idrem/drem.hpp"
#include "idrem/errors.hpp"
#include "idrem/integrator.hpp"
#include "idrem/matrix_kernel.hpp"
#include "idrem/signal_filters.hpp"
#include "idrem/simulation.hpp"
#include "idrem/trace.hpp"
#include "idrem/trace_io.hpp"
