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

#include <stdexcept>
#include <string>

namespace satrt
{

// Exception types. Everything derives from std::runtime_error or std::invalid_argument so
// callers that only care about "something failed" can catch the standard bases.

struct format_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct validation_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct argument_error : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct geometry_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Raised when an internal contract between modules is broken (e.g. the tracer handed
// the field solver a back-facing scatter tile). Indicates a bug, not bad input.
struct contract_error : std::logic_error
{
    using std::logic_error::logic_error;
};

struct insufficient_data_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct undefined_statistic_error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct placement_error : std::runtime_error
{
    placement_error(const std::string &msg, std::size_t achieved)
        : std::runtime_error(msg), achieved_count(achieved) {}
    std::size_t achieved_count;
};

} // namespace satrt
