#pragma once

#include "msvar/em.hpp"

#include <string>

namespace msvar {

inline constexpr const char* kSchemaVersion = "msvar-fit-1";

/// Documented JSON fit artifact: model matrices as row-major nested arrays,
/// support index list, objective trace, penalty settings.
std::string fit_to_json(const FitResult& fit);

MsVarModel model_from_json(const std::string& json_text);

void save_fit(const std::string& path, const FitResult& fit);
MsVarModel load_model(const std::string& path);

}  // namespace msvar
