#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace afp {

enum class OperatorClass { GAlphaPlain, GMohseni, GChatterjea, GMohsenialhosseini, GMohseniSemi };

inline constexpr std::array<OperatorClass, 5> kAllClasses{
    OperatorClass::GAlphaPlain, OperatorClass::GMohseni, OperatorClass::GChatterjea,
    OperatorClass::GMohsenialhosseini, OperatorClass::GMohseniSemi};

const char* class_name(OperatorClass c) noexcept;
std::optional<OperatorClass> class_from_name(std::string_view name);

}  // namespace afp
