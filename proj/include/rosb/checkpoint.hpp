#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace rosb {

struct CorruptCheckpoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Self-describing binary container of named matrices and strings.
// Layout: magic "ROSBCKP1", u32 version, u32 entry count, then per entry a
// kind byte, a length-prefixed name and the payload (u64 rows, u64 cols and
// raw little-endian doubles for matrices; u32 length and bytes for strings).
class CkptWriter {
 public:
  void add_matrix(const std::string& name, const Eigen::MatrixXd& m);
  void add_vector(const std::string& name, const Eigen::VectorXd& v);
  void add_scalar(const std::string& name, double v);
  void add_string(const std::string& name, const std::string& v);

  void write(const std::filesystem::path& path) const;

 private:
  std::map<std::string, Eigen::MatrixXd> matrices_;
  std::map<std::string, std::string> strings_;
};

class CkptReader {
 public:
  explicit CkptReader(const std::filesystem::path& path);  // throws CorruptCheckpoint

  bool has_matrix(const std::string& name) const { return matrices_.count(name) > 0; }
  bool has_string(const std::string& name) const { return strings_.count(name) > 0; }
  const Eigen::MatrixXd& matrix(const std::string& name) const;
  Eigen::VectorXd vector(const std::string& name) const;
  double scalar(const std::string& name) const;
  const std::string& str(const std::string& name) const;

 private:
  std::map<std::string, Eigen::MatrixXd> matrices_;
  std::map<std::string, std::string> strings_;
};

}  // namespace rosb
