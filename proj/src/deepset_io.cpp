#include "banditvote/deepset_io.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace banditvote {
namespace {

using nlohmann::json;

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr int kFormatVersion = 1;

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  throw std::runtime_error("invalid base64 character");
}

std::string block_b64(const Mat& block) {
  return base64_encode(reinterpret_cast<const std::uint8_t*>(block.data()),
                       static_cast<std::size_t>(block.size()) * sizeof(double));
}

std::string block_b64(const Vec& block) {
  return base64_encode(reinterpret_cast<const std::uint8_t*>(block.data()),
                       static_cast<std::size_t>(block.size()) * sizeof(double));
}

void fill_block(double* dst, Eigen::Index count, const json& entry,
                Eigen::Index rows, Eigen::Index cols) {
  if (entry.at("rows").get<Eigen::Index>() != rows ||
      entry.at("cols").get<Eigen::Index>() != cols)
    throw std::runtime_error("model file: parameter shape mismatch for " +
                             entry.at("name").get<std::string>());
  const std::vector<std::uint8_t> bytes =
      base64_decode(entry.at("data").get<std::string>());
  if (bytes.size() != static_cast<std::size_t>(count) * sizeof(double))
    throw std::runtime_error("model file: parameter size mismatch for " +
                             entry.at("name").get<std::string>());
  std::memcpy(dst, bytes.data(), bytes.size());
}

}  // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t size) {
  std::string out;
  out.reserve((size + 2) / 3 * 4);
  for (std::size_t i = 0; i < size; i += 3) {
    const std::uint32_t b0 = data[i];
    const std::uint32_t b1 = i + 1 < size ? data[i + 1] : 0;
    const std::uint32_t b2 = i + 2 < size ? data[i + 2] : 0;
    const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
    out.push_back(kAlphabet[(triple >> 18) & 0x3f]);
    out.push_back(kAlphabet[(triple >> 12) & 0x3f]);
    out.push_back(i + 1 < size ? kAlphabet[(triple >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < size ? kAlphabet[triple & 0x3f] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0)
    throw std::runtime_error("invalid base64 length");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool pad1 = text[i + 2] == '=';
    const bool pad2 = text[i + 3] == '=';
    if (pad1 && !pad2)
      throw std::runtime_error("invalid base64 padding");
    const std::uint32_t c0 =
        static_cast<std::uint32_t>(decode_char(text[i]));
    const std::uint32_t c1 =
        static_cast<std::uint32_t>(decode_char(text[i + 1]));
    const std::uint32_t c2 =
        pad1 ? 0 : static_cast<std::uint32_t>(decode_char(text[i + 2]));
    const std::uint32_t c3 =
        pad2 ? 0 : static_cast<std::uint32_t>(decode_char(text[i + 3]));
    const std::uint32_t triple = (c0 << 18) | (c1 << 12) | (c2 << 6) | c3;
    out.push_back(static_cast<std::uint8_t>((triple >> 16) & 0xff));
    if (!pad1) out.push_back(static_cast<std::uint8_t>((triple >> 8) & 0xff));
    if (!pad2) out.push_back(static_cast<std::uint8_t>(triple & 0xff));
  }
  return out;
}

void save_model(const DeepSetModel& model, const std::string& path) {
  json doc;
  doc["format"] = "banditvote-model";
  doc["version"] = kFormatVersion;
  doc["input_width"] = model.input_width;
  doc["hidden_width"] = model.hidden_width;
  doc["encoder_layers"] = model.encoder.size();
  doc["decoder_layers"] = model.decoder.size() - 1;
  doc["pool"] = to_string(model.pool);
  doc["agg"] = to_string(model.agg);
  json params = json::array();
  auto dump = [&params](const std::vector<EquivariantLayer>& layers,
                        const std::string& prefix) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const std::string base = prefix + "." + std::to_string(l);
      params.push_back({{"name", base + ".W"},
                        {"rows", layers[l].W.rows()},
                        {"cols", layers[l].W.cols()},
                        {"data", block_b64(layers[l].W)}});
      params.push_back({{"name", base + ".b"},
                        {"rows", layers[l].b.size()},
                        {"cols", 1},
                        {"data", block_b64(layers[l].b)}});
    }
  };
  dump(model.encoder, "encoder");
  dump(model.decoder, "decoder");
  doc["params"] = std::move(params);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path);
}

DeepSetModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::runtime_error("model file " + path + " is not valid JSON: " +
                             e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "banditvote-model")
      throw std::runtime_error("model file " + path + ": unknown format");
    if (doc.at("version").get<int>() != kFormatVersion)
      throw std::runtime_error("model file " + path +
                               ": unsupported version");
    if (doc.at("input_width").get<int>() != 2)
      throw std::runtime_error("model file " + path +
                               ": unsupported input width");
    DeepSetModel model = make_model(doc.at("encoder_layers").get<int>(),
                                    doc.at("decoder_layers").get<int>(),
                                    doc.at("hidden_width").get<int>(),
                                    pool_from_string(doc.at("pool")),
                                    agg_from_string(doc.at("agg")));
    const json& params = doc.at("params");
    std::size_t at = 0;
    auto read = [&](std::vector<EquivariantLayer>& layers,
                    const std::string& prefix) {
      for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string base = prefix + "." + std::to_string(l);
        if (at + 2 > params.size())
          throw std::runtime_error("model file: missing parameters");
        const json& w_entry = params.at(at++);
        if (w_entry.at("name").get<std::string>() != base + ".W")
          throw std::runtime_error("model file: unexpected parameter order");
        fill_block(layers[l].W.data(), layers[l].W.size(), w_entry,
                   layers[l].W.rows(), layers[l].W.cols());
        const json& b_entry = params.at(at++);
        if (b_entry.at("name").get<std::string>() != base + ".b")
          throw std::runtime_error("model file: unexpected parameter order");
        fill_block(layers[l].b.data(), layers[l].b.size(), b_entry,
                   layers[l].b.size(), 1);
      }
    };
    read(model.encoder, "encoder");
    read(model.decoder, "decoder");
    if (at != params.size())
      throw std::runtime_error("model file: extra parameter blocks");
    return model;
  } catch (const json::exception& e) {
    throw std::runtime_error("model file " + path + " is malformed: " +
                             e.what());
  }
}

}  // namespace banditvote
