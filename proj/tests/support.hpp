#pragma once

#include <hcdg/model_io.hpp>
#include <hcdg/sampling.hpp>

namespace hcdg::test {

inline ChartModel model(const std::string& name) { return load_model(std::string(HCDG_MODEL_DIR) + "/" + name + ".model"); }

} // namespace hcdg::test
