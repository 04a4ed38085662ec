#pragma once

#include <string>

#include "flatspec/surface.hpp"

namespace testdata {

inline std::string path(const std::string& name) { return std::string(FLATSPEC_DATA_DIR) + "/" + name; }
inline flatspec::FlatSurface load(const std::string& name) { return flatspec::load_surface(path(name)); }

}  // namespace testdata
