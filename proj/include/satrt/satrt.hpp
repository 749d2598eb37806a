// SPDX-License-Identifier: Apache-2.0
//
// satrt - satellite-to-urban ray-tracing channel simulator
// Copyright (C) 2026 The satrt authors
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

#include "errors.hpp"
#include "math.hpp"
#include "polygon.hpp"
#include "material.hpp"
#include "scene.hpp"
#include "scene_io.hpp"
#include "synth_city.hpp"
#include "antennas.hpp"
#include "occlusion.hpp"
#include "environment.hpp"
#include "tracer.hpp"
#include "fresnel.hpp"
#include "utd.hpp"
#include "field.hpp"
#include "rician.hpp"
#include "stats.hpp"
#include "campaign.hpp"
