#pragma once

#include <memory>
#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "strh2/sysmodel.hpp"

namespace strh2 {

using ModelAny = std::variant<StateSpaceFOM, SecondOrderFOM, SecondOrderROM, PHModel, DelayROM,
                              DiagonalStructuredROM, ParamSepModel>;

nlohmann::json model_to_json(const ModelAny& model);
ModelAny model_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const ModelAny& model);
ModelAny load_model(const std::string& path);

std::shared_ptr<TransferEvaluator> evaluator_for(const ModelAny& model);
std::string model_kind(const ModelAny& model);
Index model_order(const ModelAny& model);
Index model_inputs(const ModelAny& model);
Index model_outputs(const ModelAny& model);

/// Writes pretty-printed JSON with a trailing newline (stable, diffable).
void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace strh2
