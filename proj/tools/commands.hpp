#pragma once

#include <CLI11.hpp>

#include <functional>

namespace lvr::cli {

/// Registers every subcommand on `app`. The returned callback runs the one
/// that was selected; it throws lvr::Error on domain errors.
std::function<void()> register_commands(CLI::App& app);

}  // namespace lvr::cli
