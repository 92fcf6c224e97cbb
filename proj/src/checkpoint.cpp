#include "rosb/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace rosb {

namespace {

constexpr char kMagic[8] = {'R', 'O', 'S', 'B', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw CorruptCheckpoint("checkpoint: truncated file");
  return v;
}

void put_name(std::ostream& os, const std::string& name) {
  put<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
}

std::string get_name(std::istream& is) {
  const auto len = get<std::uint16_t>(is);
  std::string s(len, '\0');
  is.read(s.data(), len);
  if (!is) throw CorruptCheckpoint("checkpoint: truncated name");
  return s;
}

}  // namespace

void CkptWriter::add_matrix(const std::string& name, const Eigen::MatrixXd& m) {
  matrices_[name] = m;
}

void CkptWriter::add_vector(const std::string& name, const Eigen::VectorXd& v) {
  matrices_[name] = v;
}

void CkptWriter::add_scalar(const std::string& name, double v) {
  matrices_[name] = Eigen::MatrixXd::Constant(1, 1, v);
}

void CkptWriter::add_string(const std::string& name, const std::string& v) {
  strings_[name] = v;
}

void CkptWriter::write(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(matrices_.size() + strings_.size()));
  for (const auto& [name, m] : matrices_) {
    put<std::uint8_t>(os, 0);
    put_name(os, name);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * m.size()));
  }
  for (const auto& [name, s] : strings_) {
    put<std::uint8_t>(os, 1);
    put_name(os, name);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

CkptReader::CkptReader(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CorruptCheckpoint("cannot open checkpoint: " + path.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw CorruptCheckpoint("bad checkpoint magic: " + path.string());
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion)
    throw CorruptCheckpoint("unsupported checkpoint version " + std::to_string(version));
  const auto n = get<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto kind = get<std::uint8_t>(is);
    const std::string name = get_name(is);
    if (kind == 0) {
      const auto rows = get<std::uint64_t>(is);
      const auto cols = get<std::uint64_t>(is);
      if (rows > (1u << 24) || cols > (1u << 24))
        throw CorruptCheckpoint("checkpoint: implausible matrix shape");
      Eigen::MatrixXd m(rows, cols);
      is.read(reinterpret_cast<char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
      if (!is) throw CorruptCheckpoint("checkpoint: truncated matrix " + name);
      matrices_[name] = std::move(m);
    } else if (kind == 1) {
      const auto len = get<std::uint32_t>(is);
      std::string s(len, '\0');
      is.read(s.data(), len);
      if (!is) throw CorruptCheckpoint("checkpoint: truncated string " + name);
      strings_[name] = std::move(s);
    } else {
      throw CorruptCheckpoint("checkpoint: unknown entry kind");
    }
  }
}

const Eigen::MatrixXd& CkptReader::matrix(const std::string& name) const {
  const auto it = matrices_.find(name);
  if (it == matrices_.end()) throw CorruptCheckpoint("checkpoint: missing entry " + name);
  return it->second;
}

Eigen::VectorXd CkptReader::vector(const std::string& name) const {
  const Eigen::MatrixXd& m = matrix(name);
  if (m.cols() != 1) throw CorruptCheckpoint("checkpoint: " + name + " is not a vector");
  return m.col(0);
}

double CkptReader::scalar(const std::string& name) const {
  const Eigen::MatrixXd& m = matrix(name);
  if (m.size() != 1) throw CorruptCheckpoint("checkpoint: " + name + " is not a scalar");
  return m(0, 0);
}

const std::string& CkptReader::str(const std::string& name) const {
  const auto it = strings_.find(name);
  if (it == strings_.end()) throw CorruptCheckpoint("checkpoint: missing entry " + name);
  return it->second;
}

}  // namespace rosb
