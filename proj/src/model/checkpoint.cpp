// Copyright (c) 2026 The protfit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "protfit/model/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>

#include "protfit/seq/vocab.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"

namespace protfit::model {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'P', 'F', 'C', 'K', 'P', 'T', '\0', '\1'};

class Writer {
 public:
  template <class T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void put_string32(std::string_view s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void put_string64(std::string_view s) {
    put<std::uint64_t>(s.size());
    out_.append(s);
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(std::string_view bytes, std::string source)
      : bytes_(bytes), source_(std::move(source)) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string get_string32() { return std::string(take(get<std::uint32_t>())); }
  std::string get_string64() { return std::string(take(get<std::uint64_t>())); }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) {
    if (n > bytes_.size() - pos_) throw ParseError(source_ + ": truncated checkpoint");
  }
  std::string_view bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::uint32_t checksum(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  return static_cast<std::uint32_t>(
      crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace

std::string serialize_checkpoint(const ProteinLM& model, std::uint64_t step,
                                 std::string_view metadata) {
  Writer w;
  w.put_bytes(kMagic, sizeof(kMagic));
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(sizeof(nn::Scalar));
  w.put<std::uint64_t>(step);
  w.put_string64(model.config().to_text());
  w.put_string64(metadata);
  const auto& params = model.parameters();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(params.count()));
  for (const auto& p : params) {
    w.put_string32(p.name);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t d : p.value.shape()) w.put<std::uint64_t>(d);
    w.put_bytes(p.value.data(), p.value.size() * sizeof(nn::Scalar));
  }
  w.put<std::uint32_t>(checksum(w.str()));
  return std::move(w.str());
}

LoadedCheckpoint deserialize_checkpoint(std::string_view bytes, const std::string& source) {
  if (bytes.size() < sizeof(kMagic) + 4) throw ParseError(source + ": not a checkpoint");
  const std::string_view body = bytes.substr(0, bytes.size() - 4);
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), 4);
  if (checksum(body) != stored) {
    throw ChecksumError(source + ": checkpoint checksum mismatch (file corrupted)");
  }
  Reader r(body, source);
  if (std::memcmp(r.take(sizeof(kMagic)).data(), kMagic, sizeof(kMagic)) != 0) {
    throw ParseError(source + ": bad checkpoint magic");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw ConfigError(source + ": checkpoint format version " + std::to_string(version) +
                      " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  const auto scalar_bytes = r.get<std::uint32_t>();
  if (scalar_bytes != sizeof(nn::Scalar)) {
    throw ConfigError(source + ": checkpoint stores " + std::to_string(scalar_bytes * 8) +
                      "-bit parameters but this build uses " + nn::kPrecisionName);
  }
  const auto step = r.get<std::uint64_t>();
  const ModelConfig config = ModelConfig::from_text(r.get_string64(), source + " [config]");
  if (config.vocab_size != static_cast<std::size_t>(seq::kVocabSize)) {
    throw ConfigError(source + ": vocab_size " + std::to_string(config.vocab_size) +
                      " does not match the residue vocabulary (" +
                      std::to_string(seq::kVocabSize) + ")");
  }
  std::string metadata = r.get_string64();
  LoadedCheckpoint out{ProteinLM(config), step, std::move(metadata)};
  auto& params = out.model.parameters();
  const auto n_params = r.get<std::uint32_t>();
  if (n_params != params.count()) {
    throw ConfigError(source + ": checkpoint has " + std::to_string(n_params) +
                      " parameters, config implies " + std::to_string(params.count()));
  }
  for (std::size_t i = 0; i < n_params; ++i) {
    const std::string name = r.get_string32();
    auto& p = params[i];
    if (name != p.name) {
      throw ConfigError(source + ": parameter " + std::to_string(i) + " is '" + name +
                        "', expected '" + p.name + "'");
    }
    nn::Shape shape(r.get<std::uint32_t>());
    for (auto& d : shape) d = static_cast<std::size_t>(r.get<std::uint64_t>());
    if (shape != p.value.shape()) {
      throw ConfigError(source + ": parameter '" + name + "' has shape " +
                        nn::shape_string(shape) + ", expected " +
                        nn::shape_string(p.value.shape()));
    }
    const auto raw = r.take(p.value.size() * sizeof(nn::Scalar));
    std::memcpy(p.value.data(), raw.data(), raw.size());
  }
  if (r.pos() != body.size()) throw ParseError(source + ": trailing bytes in checkpoint");
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const ProteinLM& model,
                     std::uint64_t step, std::string_view metadata) {
  OutputTransaction tx;
  tx.write(path, serialize_checkpoint(model, step, metadata));
  tx.commit();
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path), path.string());
}

}  // namespace protfit::model
