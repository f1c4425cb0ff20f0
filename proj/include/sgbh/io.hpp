// Copyright 2026 The SGBH Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgbh/ldp.hpp"
#include "sgbh/skeleton.hpp"
#include "sgbh/solver.hpp"

namespace sgbh::io {

/// Round-trippable decimal (%.17g); infinities as "inf"/"-inf".
std::string format_double(double v);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);
void write_energy_csv(const std::filesystem::path& path, const EnergyLedger& ledger);
void write_mc_csv(const std::filesystem::path& path, const std::vector<MCEstimate>& estimates);
void write_control_csv(const std::filesystem::path& path, const Control& control);
void write_uniform_csv(const std::filesystem::path& path, const UniformReport& report);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sgbh::io
