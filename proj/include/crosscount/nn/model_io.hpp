#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>

#include "crosscount/error.hpp"
#include "crosscount/io.hpp"
#include "crosscount/nn/train.hpp"

namespace crosscount::nn {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "crosscount-lstm";

namespace detail {

using nlohmann::json;

inline json matrix_to_json(const Eigen::Ref<const MatrixXd>& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const Eigen::Ref<const VectorXd>& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

inline void json_to_vector(const json& j, Eigen::Ref<VectorXd> v, const std::string& what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(v.size())) {
    fail(ErrorKind::Mismatch, "model tensor '" + what + "' does not have " + std::to_string(v.size()) + " entries");
  }
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!j[k].is_number()) fail(ErrorKind::Parse, "model tensor '" + what + "' holds a non-number");
    v[k] = j[k].get<double>();
  }
}

inline void json_to_matrix(const json& j, Eigen::Ref<MatrixXd> m, const std::string& what) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(m.rows())) {
    fail(ErrorKind::Mismatch, "model tensor '" + what + "' does not have " + std::to_string(m.rows()) + " rows");
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(m.cols())) {
      fail(ErrorKind::Mismatch, "model tensor '" + what + "' row " + std::to_string(r) + " does not have " +
                                    std::to_string(m.cols()) + " columns");
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!row[c].is_number()) fail(ErrorKind::Parse, "model tensor '" + what + "' holds a non-number");
      m(r, c) = row[c].get<double>();
    }
  }
}

}  // namespace detail

inline nlohmann::json model_to_json(const LstmModel& model) {
  using detail::json;
  const int H = model.hidden();
  const auto& p = model.params;
  json input = json::object(), recurrent = json::object(), bias = json::object();
  for (int g = 0; g < 4; ++g) {
    const std::string name(kGateNames[g]);
    input[name] = detail::vector_to_json(p.w_input.segment(g * H, H));
    recurrent[name] = detail::matrix_to_json(p.w_recurrent.middleRows(g * H, H));
    bias[name] = detail::vector_to_json(p.bias.segment(g * H, H));
  }
  json j;
  j["format"] = kModelFormatName;
  j["format_version"] = kModelFormatVersion;
  j["architecture"] = {{"hidden", H},
                       {"classes", model.classes()},
                       {"input_size", 1},
                       {"w", model.w},
                       {"slot_duration", model.slot_duration}};
  j["training"] = {{"learning_rate", model.hyper.learning_rate},
                   {"momentum", model.hyper.momentum},
                   {"epochs", model.hyper.epochs},
                   {"batch_size", model.hyper.batch_size},
                   {"rng_seed", model.hyper.rng_seed},
                   {"clip_norm", model.hyper.clip_norm}};
  j["weights"] = {{"input", input},
                  {"recurrent", recurrent},
                  {"gate_bias", bias},
                  {"dense", detail::matrix_to_json(p.w_dense)},
                  {"dense_bias", detail::vector_to_json(p.b_dense)}};
  return j;
}

inline LstmModel model_from_json(const nlohmann::json& j) {
  using detail::json;
  try {
    if (!j.is_object() || j.value("format", std::string{}) != kModelFormatName) {
      fail(ErrorKind::Parse, "not a crosscount model document");
    }
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      fail(ErrorKind::Version, "model format version " + std::to_string(version) + " is not supported (expected " +
                                   std::to_string(kModelFormatVersion) + ")");
    }
    const auto& arch = j.at("architecture");
    const int H = arch.at("hidden").get<int>();
    const int K = arch.at("classes").get<int>();
    if (H < 1 || K < 2 || arch.at("input_size").get<int>() != 1) {
      fail(ErrorKind::Mismatch, "model architecture metadata is degenerate");
    }
    LstmModel model;
    model.params = LstmParams::zeros(H, K);
    model.w = arch.at("w").get<std::size_t>();
    model.slot_duration = arch.at("slot_duration").get<double>();
    if (model.w < 1 || !(model.slot_duration > 0.0)) fail(ErrorKind::Mismatch, "model window metadata is invalid");

    const auto& tr = j.at("training");
    model.hyper.learning_rate = tr.at("learning_rate").get<double>();
    model.hyper.momentum = tr.at("momentum").get<double>();
    model.hyper.epochs = tr.at("epochs").get<int>();
    model.hyper.batch_size = tr.at("batch_size").get<int>();
    model.hyper.rng_seed = tr.at("rng_seed").get<std::uint64_t>();
    model.hyper.clip_norm = tr.value("clip_norm", 0.0);

    const auto& wj = j.at("weights");
    auto& p = model.params;
    for (int g = 0; g < 4; ++g) {
      const std::string name(kGateNames[g]);
      detail::json_to_vector(wj.at("input").at(name), p.w_input.segment(g * H, H), "input." + name);
      detail::json_to_matrix(wj.at("recurrent").at(name), p.w_recurrent.middleRows(g * H, H), "recurrent." + name);
      detail::json_to_vector(wj.at("gate_bias").at(name), p.bias.segment(g * H, H), "gate_bias." + name);
    }
    detail::json_to_matrix(wj.at("dense"), p.w_dense, "dense");
    detail::json_to_vector(wj.at("dense_bias"), p.b_dense, "dense_bias");
    if (!p.all_finite()) fail(ErrorKind::Numeric, "model holds non-finite weights");
    return model;
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("corrupt model document: ") + e.what());
  }
}

inline std::string serialize_model(const LstmModel& model) { return model_to_json(model).dump(1) + "\n"; }

inline LstmModel deserialize_model(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("corrupt model file: ") + e.what());
  }
  return model_from_json(j);
}

inline void save_model(const LstmModel& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, serialize_model(model));
}

inline LstmModel load_model(const std::filesystem::path& path) { return deserialize_model(io::read_file(path)); }

}  // namespace crosscount::nn
