#include "champ/checkpoint.hpp"

#include <sodium.h>
#include <unistd.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "champ/errors.hpp"

namespace champ {

static_assert(std::endian::native == std::endian::little, "checkpoint encoding assumes a little-endian host");

using nlohmann::json;

namespace {

std::vector<unsigned char> base64_decode(const std::string& text) {
  std::vector<unsigned char> out(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, nullptr,
                        sodium_base64_VARIANT_ORIGINAL) != 0) {
    throw DataError("checkpoint: invalid base64 payload");
  }
  out.resize(len);
  return out;
}

json mesh_to_json(const UnitaryMesh& mesh, const PruneMask* mask, std::size_t offset) {
  json j{{"size", mesh.size()}, {"phases", base64_encode_doubles(mesh.phases())}};
  if (mask) j["mask"] = base64_encode(mask->bits.data() + offset, mesh.phase_count());
  return j;
}

template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("checkpoint: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: bad field '") + key + "': " + e.what());
  }
}

UnitaryMesh mesh_from_json(const json& j, int expected_size, std::vector<std::uint8_t>* mask_bits) {
  const int size = get_field<int>(j, "size");
  if (size != expected_size) throw DataError("checkpoint: mesh size disagrees with architecture");
  UnitaryMesh mesh(size);
  const auto phases = base64_decode_doubles(get_field<std::string>(j, "phases"));
  if (phases.size() != mesh.phase_count()) throw DataError("checkpoint: phase array has wrong length");
  mesh.set_phases(phases);
  if (mask_bits) {
    const auto bits = base64_decode(get_field<std::string>(j, "mask"));
    if (bits.size() != mesh.phase_count()) throw DataError("checkpoint: mask array has wrong length");
    for (auto b : bits) {
      if (b > 1) throw DataError("checkpoint: mask bits must be 0 or 1");
    }
    mask_bits->insert(mask_bits->end(), bits.begin(), bits.end());
  }
  return mesh;
}

}  // namespace

std::string base64_encode(const void* data, std::size_t size) {
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  std::string out(sodium_base64_ENCODED_LEN(size, sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(out.data(), out.size(), static_cast<const unsigned char*>(data), size,
                    sodium_base64_VARIANT_ORIGINAL);
  out.resize(std::strlen(out.c_str()));
  return out;
}

std::string base64_encode_doubles(const std::vector<double>& values) {
  return base64_encode(values.data(), values.size() * sizeof(double));
}

std::vector<double> base64_decode_doubles(const std::string& text) {
  const auto bytes = base64_decode(text);
  if (bytes.size() % sizeof(double) != 0) throw DataError("checkpoint: double array has a partial element");
  std::vector<double> out(bytes.size() / sizeof(double));
  if (!out.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
  return out;
}

std::string checkpoint_to_json(const ModelCheckpoint& ckpt) {
  validate_network(ckpt.net);
  if (ckpt.mask && ckpt.mask->size() != ckpt.net.phase_count()) {
    throw std::invalid_argument("checkpoint: mask length does not match the phase count");
  }
  const PruneMask* mask = ckpt.mask ? &*ckpt.mask : nullptr;
  json layers = json::array();
  std::size_t offset = 0;
  for (const auto& l : ckpt.net.layers) {
    json jl{{"in_dim", l.in_dim()}, {"out_dim", l.out_dim()}};
    jl["mesh_v"] = mesh_to_json(l.mesh_v, mask, offset);
    offset += l.mesh_v.phase_count();
    jl["mesh_u"] = mesh_to_json(l.mesh_u, mask, offset);
    offset += l.mesh_u.phase_count();
    jl["gain_params"] = base64_encode_doubles(l.gain_params);
    layers.push_back(std::move(jl));
  }
  json j{
      {"schema_version", kCheckpointSchemaVersion},
      {"architecture", {{"dims", ckpt.net.dims()}, {"class_count", ckpt.net.class_count}}},
      {"activation", {{"kind", "modrelu"}, {"biases_b64", base64_encode_doubles(ckpt.net.activation.biases)}}},
      {"has_mask", mask != nullptr},
      {"layers", std::move(layers)},
      {"training", {{"seed", ckpt.training.seed}, {"epochs", ckpt.training.epochs}}},
  };
  // Readable copy of the biases; the base64 field is authoritative.
  j["activation"]["biases"] = ckpt.net.activation.biases;
  return j.dump(1) + "\n";
}

ModelCheckpoint checkpoint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("checkpoint: not valid JSON: ") + e.what());
  }
  if (get_field<int>(j, "schema_version") != kCheckpointSchemaVersion) {
    throw DataError("checkpoint: unsupported schema_version");
  }
  ModelCheckpoint ckpt;
  const auto arch = get_field<json>(j, "architecture");
  const auto dims = get_field<std::vector<int>>(arch, "dims");
  ckpt.net.class_count = get_field<int>(arch, "class_count");
  const auto act = get_field<json>(j, "activation");
  if (get_field<std::string>(act, "kind") != "modrelu") throw DataError("checkpoint: unknown activation kind");
  ckpt.net.activation.biases = base64_decode_doubles(get_field<std::string>(act, "biases_b64"));

  const bool has_mask = get_field<bool>(j, "has_mask");
  std::vector<std::uint8_t> bits;
  const auto layers = get_field<json>(j, "layers");
  if (!layers.is_array() || dims.size() != layers.size() + 1) {
    throw DataError("checkpoint: layer list disagrees with architecture dims");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& jl = layers[i];
    if (dims[i] < 1 || dims[i + 1] < 1) throw DataError("checkpoint: dimensions must be >= 1");
    if (get_field<int>(jl, "in_dim") != dims[i] || get_field<int>(jl, "out_dim") != dims[i + 1]) {
      throw DataError("checkpoint: layer shape disagrees with architecture dims");
    }
    SvdLayer layer;
    layer.mesh_v = mesh_from_json(get_field<json>(jl, "mesh_v"), dims[i], has_mask ? &bits : nullptr);
    layer.mesh_u = mesh_from_json(get_field<json>(jl, "mesh_u"), dims[i + 1], has_mask ? &bits : nullptr);
    layer.gain_params = base64_decode_doubles(get_field<std::string>(jl, "gain_params"));
    ckpt.net.layers.push_back(std::move(layer));
  }
  try {
    validate_network(ckpt.net);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  if (has_mask) ckpt.mask = PruneMask{std::move(bits)};
  const auto tr = get_field<json>(j, "training");
  ckpt.training.seed = get_field<std::uint64_t>(tr, "seed");
  ckpt.training.epochs = get_field<int>(tr, "epochs");
  return ckpt;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void save_checkpoint(const std::filesystem::path& path, const ModelCheckpoint& ckpt) {
  write_file_atomic(path, checkpoint_to_json(ckpt));
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_text_file(path));
}

}  // namespace champ
