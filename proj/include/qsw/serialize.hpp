// Copyright 2026 The qswr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Report serialization. Doubles are written with 17 significant digits so a
// report is bit-reproducible and round-trips exactly; non-finite values become null.

#include <cstdint>
#include <string>

#include "json.hpp"
#include "qsw/engineer.hpp"
#include "qsw/microscopic.hpp"
#include "qsw/verify.hpp"
#include "qsw/walk.hpp"

namespace qsw {

using Json = nlohmann::ordered_json;

std::string dump_json(const Json& value, int indent = 2);
std::string format_double(double v);
/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

Json to_json(const RealMatrix& m);
/// {"re": [[...]], "im": [[...]]}
Json to_json(const Matrix& m);
Json to_json(const RealVector& v);

Json to_json(const BathCouplingSpec& spec);
Json to_json(const RateReport& report);
Json to_json(const RealizabilityReport& report);
Json to_json(const EngineeringSolution& solution);
Json to_json(const SuiteResult& suite);
Json to_json(const PropagationMetadata& meta);

/// Fixed-width verdict table for the analyze job.
std::string verdict_table(const RealizabilityReport& report);

/// CSV: time, p_<label>..., then re_/im_ pairs of upper-triangle coherences when requested.
std::string trajectory_csv(const Trajectory& trajectory, bool coherences,
                           const std::string& comment_block);
std::string trace_csv(const EngineeringSolution& solution, const std::string& comment_block);

}  // namespace qsw
