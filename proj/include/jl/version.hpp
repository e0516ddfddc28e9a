#pragma once

namespace jl {

inline constexpr const char* version = "0.1.0";

}
