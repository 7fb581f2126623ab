#include "fasisac/checkpoint.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fasisac/errors.hpp"

namespace fasisac {
namespace {

template <typename T>
void write_pod(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T value;
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw ConfigError("checkpoint: truncated stream");
  return value;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(m.rows()));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Eigen::MatrixXd read_matrix(std::istream& is) {
  const auto rows = read_pod<std::uint32_t>(is);
  const auto cols = read_pod<std::uint32_t>(is);
  if (rows == 0 || cols == 0 || static_cast<std::uint64_t>(rows) * cols > (1u << 26)) {
    throw ConfigError("checkpoint: implausible matrix shape");
  }
  Eigen::MatrixXd m(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!is) throw ConfigError("checkpoint: truncated matrix data");
  return m;
}

void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Eigen::VectorXd read_vector(std::istream& is) {
  const auto len = read_pod<std::uint32_t>(is);
  if (len == 0 || len > (1u << 26)) {
    throw ConfigError("checkpoint: implausible vector length");
  }
  Eigen::VectorXd v(len);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw ConfigError("checkpoint: truncated vector data");
  return v;
}

}  // namespace

void write_checkpoint_header(std::ostream& os) {
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_pod<std::uint32_t>(os, kCheckpointVersion);
}

std::uint32_t read_checkpoint_header(std::istream& is) {
  char magic[sizeof(kCheckpointMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
    throw ConfigError("checkpoint: bad magic header");
  }
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kCheckpointVersion) {
    throw ConfigError("checkpoint: unsupported format version " +
                      std::to_string(version));
  }
  return version;
}

void save_mlp(std::ostream& os, const Mlp& net) {
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(net.layer_dims().size()));
  for (int d : net.layer_dims()) write_pod<std::int32_t>(os, d);
  write_pod<std::uint8_t>(
      os, net.output_activation() == OutputActivation::kTanhScaled ? 1 : 0);
  write_pod<double>(os, net.output_scale());
  write_pod<std::int32_t>(os, net.aux_dim());
  for (int l = 0; l < net.num_layers(); ++l) {
    write_matrix(os, net.weights()[l]);
    write_vector(os, net.biases()[l]);
  }
}

Mlp load_mlp(std::istream& is) {
  const auto dim_count = read_pod<std::uint32_t>(is);
  if (dim_count < 2 || dim_count > 64) {
    throw ConfigError("checkpoint: implausible layer count");
  }
  std::vector<int> dims(dim_count);
  for (auto& d : dims) d = read_pod<std::int32_t>(is);
  const auto act_tag = read_pod<std::uint8_t>(is);
  if (act_tag > 1) throw ConfigError("checkpoint: unknown output activation");
  const double scale = read_pod<double>(is);
  const auto concat = read_pod<std::int32_t>(is);

  Mlp net(dims,
          act_tag == 1 ? OutputActivation::kTanhScaled : OutputActivation::kLinear,
          scale, concat);
  for (int l = 0; l < net.num_layers(); ++l) {
    Eigen::MatrixXd w = read_matrix(is);
    Eigen::VectorXd b = read_vector(is);
    if (w.rows() != net.weights()[l].rows() || w.cols() != net.weights()[l].cols() ||
        b.size() != net.biases()[l].size()) {
      throw ConfigError("checkpoint: parameter shapes inconsistent with dims");
    }
    net.weights()[l] = std::move(w);
    net.biases()[l] = std::move(b);
  }
  return net;
}

void save_adam_state(std::ostream& os, const AdamState& st) {
  write_pod<double>(os, st.learning_rate);
  write_pod<double>(os, st.beta1);
  write_pod<double>(os, st.beta2);
  write_pod<double>(os, st.epsilon);
  write_pod<std::uint64_t>(os, st.step_count);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(st.m_weights.size()));
  for (std::size_t l = 0; l < st.m_weights.size(); ++l) {
    write_matrix(os, st.m_weights[l]);
    write_matrix(os, st.v_weights[l]);
    write_vector(os, st.m_biases[l]);
    write_vector(os, st.v_biases[l]);
  }
}

AdamState load_adam_state(std::istream& is) {
  AdamState st;
  st.learning_rate = read_pod<double>(is);
  st.beta1 = read_pod<double>(is);
  st.beta2 = read_pod<double>(is);
  st.epsilon = read_pod<double>(is);
  st.step_count = read_pod<std::uint64_t>(is);
  const auto layers = read_pod<std::uint32_t>(is);
  if (layers > 64) throw ConfigError("checkpoint: implausible optimizer depth");
  for (std::uint32_t l = 0; l < layers; ++l) {
    st.m_weights.push_back(read_matrix(is));
    st.v_weights.push_back(read_matrix(is));
    st.m_biases.push_back(read_vector(is));
    st.v_biases.push_back(read_vector(is));
  }
  return st;
}

}  // namespace fasisac
