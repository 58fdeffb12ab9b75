// Copyright 2026 The itemvoice Authors
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

#include "itemvoice/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "itemvoice/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace itemvoice::nn {

namespace {

constexpr char kMagic[4] = {'I', 'V', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* p, std::size_t n, const std::string& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    raise(ErrorKind::CorruptFile, "truncated checkpoint: " + path);
  }
}

}  // namespace

const Tensor& Checkpoint::tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return t;
  }
  raise(ErrorKind::CorruptFile, "checkpoint has no tensor named '" + name + "'");
}

bool Checkpoint::has_tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return true;
  }
  return false;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::IoError, "cannot open for writing: " + path);

  nlohmann::json header;
  header["meta"] = ckpt.meta;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& [name, t] : ckpt.tensors) {
    table.push_back({{"name", name}, {"shape", t.shape}});
  }
  header["tensors"] = table;
  const std::string js = header.dump();

  write_bytes(out, kMagic, 4);
  const std::uint32_t ver = kVersion;
  write_bytes(out, &ver, 4);
  const std::uint64_t jlen = js.size();
  write_bytes(out, &jlen, 8);
  write_bytes(out, js.data(), js.size());

  std::vector<float> buf;
  for (const auto& [name, t] : ckpt.tensors) {
    buf.resize(static_cast<std::size_t>(t.numel()));
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(t.data[i]);
    write_bytes(out, buf.data(), buf.size() * sizeof(float));
  }
  if (!out) raise(ErrorKind::IoError, "write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::MissingCheckpoint, "cannot open checkpoint: " + path);

  char magic[4];
  read_bytes(in, magic, 4, path);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    raise(ErrorKind::BadHeader, "not a checkpoint file (bad magic): " + path);
  }
  std::uint32_t ver = 0;
  read_bytes(in, &ver, 4, path);
  if (ver != kVersion) {
    raise(ErrorKind::BadHeader, "unsupported checkpoint version " + std::to_string(ver));
  }
  std::uint64_t jlen = 0;
  read_bytes(in, &jlen, 8, path);
  if (jlen > (1ull << 30)) raise(ErrorKind::CorruptFile, "absurd header length: " + path);
  std::string js(jlen, '\0');
  read_bytes(in, js.data(), js.size(), path);

  nlohmann::json header = nlohmann::json::parse(js, nullptr, false);
  if (header.is_discarded() || !header.contains("tensors") || !header.contains("meta")) {
    raise(ErrorKind::CorruptFile, "unreadable checkpoint header: " + path);
  }

  Checkpoint ckpt;
  ckpt.meta = header["meta"];
  std::vector<float> buf;
  for (const auto& entry : header["tensors"]) {
    const std::string name = entry.at("name").get<std::string>();
    const std::vector<std::int64_t> shape = entry.at("shape").get<std::vector<std::int64_t>>();
    const std::int64_t n = shape_numel(shape);
    buf.resize(static_cast<std::size_t>(n));
    read_bytes(in, buf.data(), buf.size() * sizeof(float), path);
    Tensor t = Tensor::zeros(shape);
    for (std::size_t i = 0; i < buf.size(); ++i) t.data[i] = static_cast<double>(buf[i]);
    ckpt.tensors.emplace_back(name, std::move(t));
  }
  return ckpt;
}

Tensor round_to_f32(const Tensor& t) {
  Tensor r = t;
  for (double& v : r.data) v = static_cast<double>(static_cast<float>(v));
  return r;
}

}  // namespace itemvoice::nn
