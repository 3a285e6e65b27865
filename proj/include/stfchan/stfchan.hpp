// SPDX-License-Identifier: Apache-2.0
//
// stfchan - space-time-frequency non-stationary THz channel simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "common.hpp"
#include "random.hpp"
#include "geometry.hpp"
#include "largescale.hpp"
#include "clusters.hpp"
#include "evolution.hpp"
#include "model.hpp"
#include "cir.hpp"
#include "stats.hpp"
#include "fitting.hpp"
#include "io.hpp"
#include "config.hpp"
#include "experiment.hpp"
