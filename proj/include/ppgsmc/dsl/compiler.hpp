#pragma once

#include <optional>
#include <string>

#include "ppgsmc/dsl/ast.hpp"
#include "ppgsmc/ppg.hpp"

namespace ppgsmc::dsl {

/// Lowers a program to a PPG with start checkpoint 0.
///
/// A transition covers a maximal observe-free stretch of code. Branches whose
/// condition only reads values fixed at the start of the stretch become
/// guards; other branches (and loop heads revisited in the same stretch) end
/// it at a checkpoint. Each observe/score ends a stretch at a checkpoint
/// carrying that score; consecutive ones multiply. Program end goes to nil.
PPG compile(const ProgramAst& ast);

/// parse + compile.
PPG compile_source(std::string_view source, const ParamMap& overrides = {});

std::string to_dot(const PPG& g, const std::string& name = "ppg");

}  // namespace ppgsmc::dsl
