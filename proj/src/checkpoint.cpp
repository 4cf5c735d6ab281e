#include "padback/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "padback/errors.hpp"
#include "padback/manifest.hpp"

namespace padback {
using nlohmann::json;

std::string serialize_checkpoint(const Classifier& model) {
  validate_classifier(model);
  json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["layer_dims"] = model.layer_dims();
  j["feature_fingerprint"] = model.feature_fingerprint;
  j["input_mean"] = model.input_mean;
  j["input_scale"] = model.input_scale;
  json layers = json::array();
  for (const auto& l : model.layers) {
    layers.push_back({{"weights", l.weights}, {"bias", l.bias}});
  }
  j["layers"] = std::move(layers);
  j["prune_mask"] = model.prune_mask;
  return j.dump() + "\n";
}

Classifier deserialize_checkpoint(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: corrupt file: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kCheckpointFormat) {
      throw ParseError("checkpoint: not a padback checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw ParseError("checkpoint: unsupported version " + std::to_string(version) +
                       " (expected " + std::to_string(kCheckpointVersion) + ")");
    }
    const auto dims = j.at("layer_dims").get<std::vector<std::size_t>>();
    const auto& layers = j.at("layers");
    if (dims.size() < 3 || layers.size() + 1 != dims.size()) {
      throw ParseError("checkpoint: layer_dims and layers disagree");
    }
    Classifier model;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      DenseLayer layer;
      layer.in = dims[l];
      layer.out = dims[l + 1];
      layer.weights = layers[l].at("weights").get<std::vector<double>>();
      layer.bias = layers[l].at("bias").get<std::vector<double>>();
      model.layers.push_back(std::move(layer));
    }
    model.prune_mask = j.at("prune_mask").get<std::vector<std::uint8_t>>();
    for (auto m : model.prune_mask) {
      if (m > 1) throw ParseError("checkpoint: prune_mask entries must be 0 or 1");
    }
    model.input_mean = j.at("input_mean").get<std::vector<double>>();
    model.input_scale = j.at("input_scale").get<std::vector<double>>();
    model.feature_fingerprint = j.at("feature_fingerprint").get<std::string>();
    try {
      validate_classifier(model);
    } catch (const ValidationError& e) {
      throw ParseError(std::string("checkpoint: ") + e.what());
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: malformed contents: ") + e.what());
  }
}

void save_checkpoint(const Classifier& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(model));
}

Classifier load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("checkpoint: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize_checkpoint(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace padback
