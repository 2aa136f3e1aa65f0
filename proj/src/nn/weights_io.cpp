/*
 * Copyright 2026 The cfdsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cfd/nn/weights.hpp"

namespace cfd {

namespace {

template <typename T>
const char* dtype_name() {
  return sizeof(T) == 4 ? "f32" : "f64";
}

template <typename T>
void write_scalar_le(std::ofstream& out, T v) {
  using U = std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>;
  U u = std::bit_cast<U>(v);
  char bytes[sizeof(U)];
  for (size_t i = 0; i < sizeof(U); ++i)
    bytes[i] = static_cast<char>((u >> (8 * i)) & 0xff);
  out.write(bytes, sizeof(U));
}

template <typename T>
T read_scalar_le(std::ifstream& in) {
  using U = std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>;
  char bytes[sizeof(U)];
  in.read(bytes, sizeof(U));
  U u = 0;
  for (size_t i = 0; i < sizeof(U); ++i)
    u |= static_cast<U>(static_cast<unsigned char>(bytes[i])) << (8 * i);
  return std::bit_cast<T>(u);
}

}  // namespace

template <typename T>
void save_weights(const std::string& path, const ModelSpec& spec,
                  const ModelWeights<T>& weights) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IoError, "cannot open " + path);
  out << "CFDW 1\n";
  out << "input " << spec.input.c << ' ' << spec.input.h << ' ' << spec.input.w
      << '\n';
  out << "arch " << spec.arch_string() << '\n';
  out << "dtype " << dtype_name<T>() << '\n';
  out << "end\n";
  for (const auto& l : weights.layers) {
    for (T v : l.w) write_scalar_le(out, v);
    for (T v : l.b) write_scalar_le(out, v);
  }
  require(out.good(), ErrorCode::IoError, "failed writing " + path);
}

template <typename T>
std::pair<ModelSpec, ModelWeights<T>> load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);

  std::string line;
  std::getline(in, line);
  require(line == "CFDW 1", ErrorCode::BadMagic, "not a weights blob: " + path);

  Shape3 input;
  std::string arch, dtype;
  while (std::getline(in, line) && line != "end") {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "input")
      ls >> input.c >> input.h >> input.w;
    else if (key == "arch")
      ls >> arch;
    else if (key == "dtype")
      ls >> dtype;
    else
      fail(ErrorCode::ParseError, "unknown weights header key '" + key + "'");
  }
  require(line == "end", ErrorCode::TruncatedFile, "weights header truncated");
  require(dtype == dtype_name<T>(), ErrorCode::ParseError,
          "weights blob dtype " + dtype + " does not match the requested type");

  ModelSpec spec = parse_arch(arch, input);
  ModelWeights<T> weights = zero_weights<T>(spec);
  for (auto& l : weights.layers) {
    for (T& v : l.w) v = read_scalar_le<T>(in);
    for (T& v : l.b) v = read_scalar_le<T>(in);
    require(in.good(), ErrorCode::TruncatedFile, "weights payload truncated");
  }
  return {std::move(spec), std::move(weights)};
}

template void save_weights<float>(const std::string&, const ModelSpec&,
                                  const ModelWeights<float>&);
template void save_weights<double>(const std::string&, const ModelSpec&,
                                   const ModelWeights<double>&);
template std::pair<ModelSpec, ModelWeights<float>> load_weights<float>(
    const std::string&);
template std::pair<ModelSpec, ModelWeights<double>> load_weights<double>(
    const std::string&);

}  // namespace cfd
